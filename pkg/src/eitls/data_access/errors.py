from eitls.errors import EitlsError


class DatasetNotFoundError(EitlsError):
    def __init__(self, path: str, message: str = "Dataset not found or incomplete") -> None:
        self.path = path
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return f"{self.message} -> {self.path}"


class ResultDirError(EitlsError):
    def __init__(self, path: str, message: str = "Malformed result directory") -> None:
        self.path = path
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return f"{self.message} -> {self.path}"
