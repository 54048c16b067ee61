from eitls.errors import EitlsError


class MeshValidationError(EitlsError, ValueError):
    def __init__(self, reason: str, *args: object) -> None:
        super().__init__(reason, *args)
        self.reason = reason

    def __str__(self) -> str:
        return f"Invalid mesh - {self.reason}"


class MeshTopologyError(MeshValidationError):
    def __str__(self) -> str:
        return f"Invalid mesh topology - {self.reason}"


class MeshGenerationError(EitlsError, ValueError):
    def __init__(self, target_edge_length: float, message: str = "Mesh generation failed") -> None:
        self.target_edge_length = target_edge_length
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return f"{self.message} (target edge length {self.target_edge_length})"


class MeshParseError(EitlsError):
    def __init__(self, path: str, line_number: int, message: str = "Malformed mesh file") -> None:
        self.path = path
        self.line_number = line_number
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return f"{self.message} -> {self.path}:{self.line_number}"


class ShapeOutsideDomainError(EitlsError, ValueError):
    def __init__(self, shape: object, max_radius: float) -> None:
        super().__init__()
        self.shape = shape
        self.max_radius = max_radius

    def __str__(self) -> str:
        return f"Shape is not strictly inside the unit disk (reaches radius {self.max_radius:.6g}) - {self.shape}"
