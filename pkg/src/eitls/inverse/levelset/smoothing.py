import math
from dataclasses import dataclass

import numpy as np
from pydantic import Field
from pydantic.dataclasses import dataclass as pydantic_dataclass

from eitls.entities.eit_entities import NodalField
from eitls.entities.mesh_entities import TriMesh
from eitls.inverse.fem.coefficients import CoefficientEvaluator


@pydantic_dataclass(frozen=True)
class SmoothingParams:
    alpha: float = Field(gt=0, allow_inf_nan=False)
    gamma: float = Field(gt=0, allow_inf_nan=False)


def _check_alpha(alpha: float) -> None:
    if not (math.isfinite(alpha) and alpha > 0):
        raise ValueError(f"Invalid alpha: {alpha}, must be a positive number")


def _scalar_or_array(values: np.ndarray) -> 'np.ndarray|float':
    return float(values) if np.ndim(values) == 0 else values


def heaviside_alpha(q: 'np.ndarray|float', alpha: float) -> 'np.ndarray|float':
    """One-sided smoothed step: 0 below 0, ½ - ½cos(πq/α) on [0, α), 1 from α on."""
    _check_alpha(alpha)
    q = np.asarray(q, dtype=float)
    ramp = 0.5 - 0.5 * np.cos(np.pi * q / alpha)
    return _scalar_or_array(np.where(q < 0, 0.0, np.where(q < alpha, ramp, 1.0)))


def delta_alpha(q: 'np.ndarray|float', alpha: float) -> 'np.ndarray|float':
    """Derivative of ``heaviside_alpha``, supported on [0, α)."""
    _check_alpha(alpha)
    q = np.asarray(q, dtype=float)
    bump = (np.pi / (2.0 * alpha)) * np.sin(np.pi * q / alpha)
    return _scalar_or_array(np.where((q >= 0) & (q < alpha), bump, 0.0))


@dataclass(frozen=True, eq=False)
class LevelSetCoefficient(CoefficientEvaluator):
    """σ = 1 + H_α(q) with q interpolated to the quadrature points."""

    q: NodalField
    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)

    def quadrature_values(self, mesh: TriMesh) -> np.ndarray:
        return 1.0 + heaviside_alpha(self.q.at_midpoints(), self.alpha)

    def delta_values(self) -> np.ndarray:
        """(m, 3) δ_α(q) at the quadrature points."""
        return delta_alpha(self.q.at_midpoints(), self.alpha)


def sigma_of_q(q: NodalField, alpha: float) -> LevelSetCoefficient:
    return LevelSetCoefficient(q, alpha)


def heaviside_field(q: NodalField, alpha: float) -> NodalField:
    return NodalField(q.mesh, heaviside_alpha(q.values, alpha), "H")


def sigma_field(q: NodalField, alpha: float) -> NodalField:
    """Nodal 1 + H_α(q), the exported conductivity."""
    return NodalField(q.mesh, 1.0 + heaviside_alpha(q.values, alpha), "sigma")
