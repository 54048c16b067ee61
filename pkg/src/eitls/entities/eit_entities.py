import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import Field
from pydantic.dataclasses import dataclass as pydantic_dataclass

from eitls.entities.mesh_entities import TriMesh
from eitls.inverse.fem.errors import FieldError
from eitls.inverse.forward.errors import BoundaryDataError, PatternError
from eitls.inverse.levelset.errors import ShapeSpecError
from eitls.utils.constants import CHI_TOL, PRNG_ID, TERMINATION
from eitls.utils.index import TWO_PI, format_float, is_strictly_increasing, wrap_angle


@dataclass(frozen=True, eq=False)
class NodalField:
    """One real value per vertex of a mesh (a P1 finite element function).

    Args:
        mesh (TriMesh): supporting mesh
        values (np.ndarray): nodal values, length ``mesh.vertex_count``
        name (str, optional): label used when the field is exported
    """

    mesh: TriMesh
    values: np.ndarray
    name: str = "field"

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True).ravel()

        if values.shape[0] != self.mesh.vertex_count:
            raise FieldError(
                f"{values.shape[0]} values for a mesh with {self.mesh.vertex_count} vertices")

        if not np.all(np.isfinite(values)):
            raise FieldError(f"non-finite values in field '{self.name}'")

        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.shape[0]

    def renamed(self, name: str) -> 'NodalField':
        return NodalField(self.mesh, self.values, name)

    def at_midpoints(self) -> np.ndarray:
        """(m, 3) values at the edge midpoints of every triangle."""
        corner = self.values[self.mesh.triangles]
        return 0.5 * (corner + np.roll(corner, -1, axis=1))

    def gradients(self) -> np.ndarray:
        """(m, 2) constant gradient on every triangle."""
        corner = self.values[self.mesh.triangles]
        return np.einsum("tid,ti->td", self.mesh.gradients, corner)

    def boundary_values(self) -> np.ndarray:
        return self.values[self.mesh.boundary_cycle]

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def _rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class EllipseShape:
    """Filled ellipse; ``rotation`` turns the first semi-axis counterclockwise."""

    center: Tuple[float, float]
    semi_axes: Tuple[float, float]
    rotation: float = 0.0
    kind: str = field(default="ellipse", init=False)

    def __post_init__(self):
        values = (*self.center, *self.semi_axes, self.rotation)
        if not all(math.isfinite(v) for v in values):
            raise ShapeSpecError(self.to_text(), "Non-finite ellipse parameters")
        if min(self.semi_axes) <= 0:
            raise ShapeSpecError(self.to_text(), "Ellipse semi-axes must be positive")

    def level(self, points: np.ndarray) -> np.ndarray:
        """Normalized level function: negative inside, zero on the curve."""
        points = np.atleast_2d(points)
        local = (points - np.asarray(self.center)) @ _rotation(self.rotation)
        a, b = self.semi_axes
        return np.hypot(local[:, 0] / a, local[:, 1] / b) - 1.0

    def contains(self, points: np.ndarray, tol: float = CHI_TOL) -> np.ndarray:
        return self.level(points) <= tol

    @property
    def area(self) -> float:
        return math.pi * self.semi_axes[0] * self.semi_axes[1]

    def outline(self, t: np.ndarray) -> np.ndarray:
        a, b = self.semi_axes
        local = np.column_stack([a * np.cos(t), b * np.sin(t)])
        return local @ _rotation(self.rotation).T + np.asarray(self.center)

    def boundary_loops(self, spacing: float) -> List[np.ndarray]:
        """Points on the ellipse, counterclockwise, roughly ``spacing`` apart in arc length."""
        dense_t = np.linspace(0.0, TWO_PI, 4097)
        dense = self.outline(dense_t)
        arc = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(dense, axis=0), axis=1))])
        count = max(12, int(math.ceil(arc[-1] / spacing)))
        targets = np.linspace(0.0, arc[-1], count, endpoint=False)
        return [self.outline(np.interp(targets, arc, dense_t))]

    @property
    def max_radius(self) -> float:
        return float(np.max(np.linalg.norm(self.outline(np.linspace(0.0, TWO_PI, 4096, endpoint=False)), axis=1)))

    def to_text(self) -> str:
        values = (*self.center, *self.semi_axes, self.rotation)
        return "ellipse " + " ".join(format_float(v) for v in values)


@dataclass(frozen=True)
class Circle:
    center: Tuple[float, float]
    radius: float


@dataclass(frozen=True)
class CirclesShape:
    """Union of pairwise disjoint closed disks."""

    circles: Tuple[Circle, ...]
    kind: str = field(default="circles", init=False)

    def __post_init__(self):
        if len(self.circles) == 0:
            raise ShapeSpecError(self.to_text(), "At least one circle is required")

        for circle in self.circles:
            if not all(math.isfinite(v) for v in (*circle.center, circle.radius)):
                raise ShapeSpecError(self.to_text(), "Non-finite circle parameters")
            if circle.radius <= 0:
                raise ShapeSpecError(self.to_text(), "Circle radius must be positive")

        for i, first in enumerate(self.circles):
            for second in self.circles[i + 1:]:
                gap = math.dist(first.center, second.center) - first.radius - second.radius
                if gap <= 0:
                    raise ShapeSpecError(self.to_text(), "Circles must be pairwise disjoint")

    def level(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        levels = [np.linalg.norm(points - np.asarray(c.center), axis=1) / c.radius - 1.0
                  for c in self.circles]
        return np.min(levels, axis=0)

    def contains(self, points: np.ndarray, tol: float = CHI_TOL) -> np.ndarray:
        return self.level(points) <= tol

    @property
    def area(self) -> float:
        return sum(math.pi * c.radius ** 2 for c in self.circles)

    def boundary_loops(self, spacing: float) -> List[np.ndarray]:
        loops = []
        for c in self.circles:
            count = max(12, int(math.ceil(TWO_PI * c.radius / spacing)))
            t = TWO_PI * np.arange(count) / count
            loops.append(np.column_stack([c.center[0] + c.radius * np.cos(t),
                                          c.center[1] + c.radius * np.sin(t)]))
        return loops

    @property
    def max_radius(self) -> float:
        return max(math.hypot(*c.center) + c.radius for c in self.circles)

    def to_text(self) -> str:
        values = [v for c in self.circles for v in (*c.center, c.radius)]
        return "circles " + " ".join(format_float(v) for v in values)


ShapeSpec = Union[EllipseShape, CirclesShape]


@dataclass(frozen=True)
class CurrentPattern:
    """Two diametrically opposite electrodes driven with +1 / -1 current density.

    ``index`` is 1-based; the source of pattern j is centered at
    π/2 + 2π(j - 1)/E and the sink at the opposite angle.
    """

    electrode_count: int
    index: int
    width: float

    def __post_init__(self):
        if self.electrode_count < 2 or self.electrode_count % 2:
            raise PatternError(self.electrode_count, self.width, "Electrode count must be even and >= 2")
        if not 0 < self.width or self.electrode_count * self.width >= TWO_PI:
            raise PatternError(self.electrode_count, self.width, "Electrodes overlap or have no width")
        if not 1 <= self.index <= self.electrode_count // 2:
            raise PatternError(self.electrode_count, self.width, f"Pattern index {self.index} out of range")

    @property
    def source_center(self) -> float:
        return wrap_angle(math.pi / 2 + TWO_PI * (self.index - 1) / self.electrode_count)

    @property
    def sink_center(self) -> float:
        return wrap_angle(self.source_center + math.pi)

    def arcs(self) -> List[Tuple[float, float, float]]:
        """(start, end, value) of both electrode arcs, start in [0, 2π), end may exceed 2π."""
        half = 0.5 * self.width
        return [(wrap_angle(self.source_center - half), wrap_angle(self.source_center - half) + self.width, 1.0),
                (wrap_angle(self.sink_center - half), wrap_angle(self.sink_center - half) + self.width, -1.0)]

    def __call__(self, angle: 'np.ndarray|float') -> 'np.ndarray|float':
        theta = np.asarray(wrap_angle(angle), dtype=float)
        result = np.zeros_like(theta)
        for start, _, value in self.arcs():
            # closed left, open right
            offset = np.mod(theta - start, TWO_PI)
            result = np.where(offset < self.width, value, result)
        return float(result) if result.ndim == 0 else result


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Boundary potential samples m_j(θ) for one current pattern."""

    angles: np.ndarray
    values: np.ndarray
    index: int = 1

    def __post_init__(self):
        angles = np.array(self.angles, dtype=float, copy=True).ravel()
        values = np.array(self.values, dtype=float, copy=True).ravel()

        if angles.shape != values.shape or angles.size == 0:
            raise BoundaryDataError(f"{angles.size} angles for {values.size} values", self.index)
        if not (np.all(np.isfinite(angles)) and np.all(np.isfinite(values))):
            raise BoundaryDataError("non-finite samples", self.index)
        if angles[0] < 0 or angles[-1] >= TWO_PI or not is_strictly_increasing(angles):
            raise BoundaryDataError("angles must be strictly increasing within [0, 2π)", self.index)

        angles.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.shape[0]

    def with_values(self, values: np.ndarray) -> 'BoundaryData':
        return BoundaryData(self.angles, values, self.index)


@pydantic_dataclass(frozen=True)
class NoiseSpec:
    """Relative noise level and seed; θ is uniform on (-1, 1) per boundary vertex."""

    level: float = Field(default=0.0, ge=0.0, allow_inf_nan=False)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    distribution: str = "uniform(-1,1)"
    prng: str = PRNG_ID


@dataclass
class ConvergenceRow:
    iteration: int
    J: float
    grad_inf: float
    step: float
    backtracks: int
    eps_err: Optional[float] = None

    def as_tuple(self) -> tuple:
        return (self.iteration, self.J, self.grad_inf, self.step, self.backtracks,
                np.nan if self.eps_err is None else self.eps_err)


@dataclass
class ConvergenceRecord:
    rows: List[ConvergenceRow] = field(default_factory=list)
    reason: Optional[str] = None

    def append(self, row: ConvergenceRow) -> None:
        self.rows.append(row)

    def finish(self, reason: str) -> None:
        if reason not in TERMINATION.values():
            raise ValueError(f"Invalid termination reason: {reason}")
        self.reason = reason

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def iterations(self) -> int:
        """Number of accepted updates."""
        return sum(1 for row in self.rows if row.step > 0)

    @property
    def costs(self) -> np.ndarray:
        return np.array([row.J for row in self.rows])

    def is_strictly_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.costs) < 0))


@dataclass
class ReconstructionResult:
    f: NodalField
    q: NodalField
    H: NodalField
    sigma: NodalField
    lam: NodalField
    record: ConvergenceRecord
    J_final: float
    grad_inf_final: float
    eps_err: Optional[float] = None

    def fields(self) -> dict:
        """Final fields keyed by their export name."""
        return {"q": self.q, "H": self.H, "sigma": self.sigma, "f": self.f, "lambda": self.lam}
