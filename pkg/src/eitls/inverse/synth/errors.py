from eitls.errors import EitlsError


class NonConformingMeshError(EitlsError, ValueError):
    def __init__(self, triangle: int, levels: tuple) -> None:
        self.triangle = triangle
        self.levels = levels
        super().__init__()

    def __str__(self) -> str:
        return f"Triangle {self.triangle} straddles the shape interface (vertex levels {self.levels})"


class NoiseError(EitlsError, ValueError):
    def __init__(self, index: int, message: str = "Cannot scale noise to a zero signal") -> None:
        self.index = index
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return f"{self.message} -> measurement {self.index}"


class InverseCrimeError(EitlsError):
    def __str__(self) -> str:
        return "Generation and reconstruction meshes are identical; pass allow_same_mesh to override"


class ResamplingError(EitlsError, ValueError):
    def __init__(self, samples: int) -> None:
        self.samples = samples
        super().__init__()

    def __str__(self) -> str:
        return f"At least 3 boundary samples are needed for resampling, got {self.samples}"
