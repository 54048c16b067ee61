from eitls.errors import EitlsError


class StaleEvaluationError(EitlsError):
    def __init__(self, chain_counter: int, current_counter: int) -> None:
        self.chain_counter = chain_counter
        self.current_counter = current_counter
        super().__init__()

    def __str__(self) -> str:
        return (f"Gradient chain built at evaluation {self.chain_counter} "
                f"used after evaluation {self.current_counter}")
