from eitls.errors import EitlsError


class FieldError(EitlsError, ValueError):
    def __init__(self, reason: str, *args: object) -> None:
        super().__init__(reason, *args)
        self.reason = reason

    def __str__(self) -> str:
        return f"Invalid nodal field - {self.reason}"


class CoefficientError(EitlsError, ValueError):
    def __init__(self, triangle: int, value: float, message: str = "Coefficient must be finite and positive") -> None:
        self.triangle = triangle
        self.value = value
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return f"{self.message} -> triangle {self.triangle}, value {self.value!r}"


class SolverConvergenceError(EitlsError):
    def __init__(self, iterations: int, residual: float, message: str = "Linear solver did not converge") -> None:
        self.iterations = iterations
        self.residual = residual
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return f"{self.message} after {self.iterations} iterations (residual {self.residual:.3e})"
