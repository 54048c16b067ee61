import numpy as np

from eitls.entities.eit_entities import Circle, CirclesShape, EllipseShape, ShapeSpec
from eitls.entities.mesh_entities import TriMesh
from eitls.inverse.fem.coefficients import PiecewiseCoefficient

from .errors import ShapeSpecError


def parse_shape(text: str) -> ShapeSpec:
    """Parse ``ellipse cx cy ax ay [rot]`` or ``circles cx1 cy1 r1 [cx2 cy2 r2 ...]``.

    Example
        >>> parse_shape("circles -0.3 0.3 0.25").circles[0].radius
        0.25
    """
    fields = text.split()
    if not fields:
        raise ShapeSpecError(text, "Empty shape")

    kind = fields[0].lower()
    try:
        values = [float(value) for value in fields[1:]]
    except ValueError:
        raise ShapeSpecError(text, "Shape parameters must be numbers") from None

    if kind == "ellipse":
        if len(values) not in (4, 5):
            raise ShapeSpecError(text, "Ellipse needs cx cy ax ay [rotation]")
        rotation = values[4] if len(values) == 5 else 0.0
        return EllipseShape((values[0], values[1]), (values[2], values[3]), rotation)

    if kind == "circles":
        if len(values) == 0 or len(values) % 3:
            raise ShapeSpecError(text, "Circles need triples cx cy r")
        circles = tuple(Circle((values[i], values[i + 1]), values[i + 2]) for i in range(0, len(values), 3))
        return CirclesShape(circles)

    raise ShapeSpecError(text, f"Unknown shape kind '{fields[0]}'")


def chi_shape(shape: ShapeSpec, x: np.ndarray) -> 'np.ndarray|int':
    """Closed indicator of the shape; points outside the unit disk map to 0."""
    points = np.asarray(x, dtype=float)
    single = points.ndim == 1
    points = np.atleast_2d(points)
    inside = shape.contains(points) & (np.linalg.norm(points, axis=1) <= 1.0)
    values = inside.astype(int)
    return int(values[0]) if single else values


def chi_quadrature(shape: ShapeSpec, mesh: TriMesh) -> np.ndarray:
    """(m, 3) indicator at the edge-midpoint quadrature points."""
    points = mesh.midpoints.reshape(-1, 2)
    return chi_shape(shape, points).reshape(mesh.triangle_count, 3).astype(float)


def true_conductivity(shape: ShapeSpec, mesh: TriMesh) -> PiecewiseCoefficient:
    """Per-triangle σ = 1 + χ_D(centroid)."""
    return PiecewiseCoefficient(1.0 + chi_shape(shape, mesh.centroids).astype(float))
