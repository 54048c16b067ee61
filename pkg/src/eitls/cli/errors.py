from eitls.errors import EitlsError


class RunConfigError(EitlsError, ValueError):
    def __init__(self, line_number: int, key: str, message: str = "Invalid configuration entry") -> None:
        self.line_number = line_number
        self.key = key
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        where = f"line {self.line_number}" if self.line_number > 0 else "arguments"
        return f"{self.message} '{self.key}' ({where})"
