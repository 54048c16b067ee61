from typing import Sequence

import numpy as np

from eitls.entities.eit_entities import BoundaryData, NodalField
from eitls.entities.mesh_entities import BoundaryParam
from eitls.inverse.synth.errors import ResamplingError
from eitls.utils.index import periodic_interp, remove_weighted_mean

from .errors import MeasurementCountError


def boundary_mass_apply(bparam: BoundaryParam, values: np.ndarray) -> np.ndarray:
    """Boundary mass matrix times ``values``, both indexed along the boundary loop."""
    lengths = bparam.edge_lengths / 6.0
    following = np.roll(values, -1)
    return lengths * (2.0 * values + following) + np.roll(lengths * (values + 2.0 * following), 1)


def boundary_norm(bparam: BoundaryParam, values: np.ndarray) -> float:
    """L² norm on the boundary with the boundary mass quadrature."""
    return float(np.sqrt(max(values @ boundary_mass_apply(bparam, values), 0.0)))


def boundary_trace(u: NodalField, bparam: BoundaryParam, index: int = 1) -> BoundaryData:
    """Boundary values of ``u`` along the loop, weighted mean removed."""
    values = u.values[bparam.vertices]
    return BoundaryData(bparam.angles, remove_weighted_mean(values, bparam.vertex_weights), index)


def resample_boundary(data: BoundaryData, target: BoundaryParam) -> BoundaryData:
    """Periodic linear interpolation in angle onto the target boundary vertices.

    Args:
        data (BoundaryData): samples covering the circle
        target (BoundaryParam): receiving boundary

    Returns:
        BoundaryData: resampled values with zero weighted mean on the target
    """
    if len(data) < 3:
        raise ResamplingError(len(data))

    values = periodic_interp(data.angles, data.values, target.angles)
    return BoundaryData(target.angles, remove_weighted_mean(values, target.vertex_weights), data.index)


def _on_boundary(data: BoundaryData, bparam: BoundaryParam) -> BoundaryData:
    if data.angles.shape == bparam.angles.shape and np.array_equal(data.angles, bparam.angles):
        return data
    return resample_boundary(data, bparam)


def cost(traces: Sequence[BoundaryData], measurements: Sequence[BoundaryData], bparam: BoundaryParam) -> float:
    """J = ½ Σ_j ∫ (u_j - m_j)² ds with the boundary mass matrix.

    Measurements sampled at other angles are resampled first.
    """
    if len(traces) != len(measurements):
        raise MeasurementCountError(len(traces), len(measurements))

    total = 0.0
    for trace, measurement in zip(traces, measurements):
        residual = _on_boundary(trace, bparam).values - _on_boundary(measurement, bparam).values
        total += 0.5 * float(residual @ boundary_mass_apply(bparam, residual))
    return total
