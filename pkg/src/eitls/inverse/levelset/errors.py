from eitls.errors import EitlsError


class ShapeSpecError(EitlsError, ValueError):
    def __init__(self, text: str, reason: str = "Invalid shape") -> None:
        self.text = text
        self.reason = reason
        super().__init__(reason)

    def __str__(self) -> str:
        return f"{self.reason} - {self.text!r}"
