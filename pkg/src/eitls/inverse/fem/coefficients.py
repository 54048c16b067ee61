from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from eitls.entities.mesh_entities import TriMesh

from .errors import CoefficientError

#rows: quadrature points at the edge midpoints (v0v1, v1v2, v2v0), columns: P1 hats
MIDPOINT_BARYCENTRIC = np.array([
    [0.5, 0.5, 0.0],
    [0.0, 0.5, 0.5],
    [0.5, 0.0, 0.5],
])
QUADRATURE_WEIGHTS = np.full(3, 1.0 / 3.0)


class CoefficientEvaluator(ABC):
    """Pointwise scalar coefficient sampled at the quadrature points."""

    @abstractmethod
    def quadrature_values(self, mesh: TriMesh) -> np.ndarray:
        """(m, 3) coefficient values at the three edge midpoints of every triangle."""


@dataclass(frozen=True)
class ConstantCoefficient(CoefficientEvaluator):
    value: float

    def quadrature_values(self, mesh: TriMesh) -> np.ndarray:
        return np.full((mesh.triangle_count, 3), float(self.value))


@dataclass(frozen=True)
class FunctionCoefficient(CoefficientEvaluator):
    function: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def quadrature_values(self, mesh: TriMesh) -> np.ndarray:
        points = mesh.midpoints
        values = self.function(points[..., 0], points[..., 1])
        return np.broadcast_to(np.asarray(values, dtype=float), points.shape[:2]).copy()


@dataclass(frozen=True, eq=False)
class PiecewiseCoefficient(CoefficientEvaluator):
    """One constant per triangle."""

    values: np.ndarray

    def quadrature_values(self, mesh: TriMesh) -> np.ndarray:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (mesh.triangle_count,):
            raise CoefficientError(-1, float("nan"), f"Expected {mesh.triangle_count} triangle values")
        return np.repeat(values[:, None], 3, axis=1)


Coefficient = Union[float, Callable, CoefficientEvaluator]


def as_coefficient(coeff: Coefficient) -> CoefficientEvaluator:
    if isinstance(coeff, CoefficientEvaluator):
        return coeff
    if isinstance(coeff, (int, float, np.number)):
        return ConstantCoefficient(float(coeff))
    if callable(coeff):
        return FunctionCoefficient(coeff)
    raise TypeError(f"Unsupported coefficient: {coeff!r}")


def evaluate_coefficient(mesh: TriMesh, coeff: Coefficient) -> np.ndarray:
    """Quadrature values of ``coeff``, rejecting non-finite or non-positive entries."""
    values = as_coefficient(coeff).quadrature_values(mesh)
    bad = ~np.isfinite(values) | (values <= 0)
    if np.any(bad):
        triangle, point = np.argwhere(bad)[0]
        raise CoefficientError(int(triangle), float(values[triangle, point]))
    return values
