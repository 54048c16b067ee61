from eitls.errors import EitlsError


class ConfigurationError(EitlsError, ValueError):
    def __init__(self, reason: str, *args: object) -> None:
        super().__init__(reason, *args)
        self.reason = reason

    def __str__(self) -> str:
        return f"Invalid reconstruction configuration - {self.reason}"


class LineSearchError(EitlsError):
    def __init__(self, backtracks: int, step: float, message: str = "No sufficient decrease found") -> None:
        self.backtracks = backtracks
        self.step = step
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return f"{self.message} after {self.backtracks} backtracks (last step {self.step:.3e})"


class ReconstructionError(EitlsError, ValueError):
    def __init__(self, reason: str, *args: object) -> None:
        super().__init__(reason, *args)
        self.reason = reason

    def __str__(self) -> str:
        return f"Reconstruction failed - {self.reason}"
