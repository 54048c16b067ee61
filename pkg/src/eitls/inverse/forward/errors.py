from eitls.errors import EitlsError


class PatternError(EitlsError, ValueError):
    def __init__(self, electrode_count: int, width: float, reason: str) -> None:
        self.electrode_count = electrode_count
        self.width = width
        self.reason = reason
        super().__init__(reason)

    def __str__(self) -> str:
        return f"{self.reason} (E={self.electrode_count}, width={self.width})"


class BoundaryDataError(EitlsError, ValueError):
    def __init__(self, reason: str, index: int = 0) -> None:
        self.reason = reason
        self.index = index
        super().__init__(reason)

    def __str__(self) -> str:
        return f"Invalid boundary data #{self.index} - {self.reason}"


class MeasurementCountError(EitlsError, ValueError):
    def __init__(self, expected: int, received: int) -> None:
        self.expected = expected
        self.received = received
        super().__init__()

    def __str__(self) -> str:
        return f"Expected {self.expected} measurements, received {self.received}"
