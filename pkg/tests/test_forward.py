import math

import numpy as np
import pytest

from eitls.entities.eit_entities import BoundaryData, CurrentPattern, NodalField
from eitls.inverse.forward.errors import BoundaryDataError, MeasurementCountError, PatternError
from eitls.inverse.forward.forward import forward_solve, forward_solve_many, pattern_load
from eitls.inverse.forward.patterns import g_eval, make_patterns
from eitls.inverse.forward.traces import boundary_norm, boundary_trace, cost, resample_boundary
from eitls.inverse.levelset.shapes import parse_shape, true_conductivity
from eitls.inverse.levelset.smoothing import sigma_of_q
from eitls.inverse.mesh.generators import boundary_param, generate_disk_mesh
from eitls.inverse.synth.errors import ResamplingError


def test_pattern_count():
    patterns = make_patterns(6)
    assert len(patterns) == 3
    assert [p.index for p in patterns] == [1, 2, 3]
    assert patterns[0].source_center == pytest.approx(math.pi / 2)
    assert patterns[0].sink_center == pytest.approx(3 * math.pi / 2)
    assert patterns[1].source_center == pytest.approx(math.pi / 2 + math.pi / 3)


@pytest.mark.parametrize("count, width", [(5, 0.1), (0, 0.1), (4, 2.0), (6, 0.0), (6, float("nan"))])
def test_invalid_patterns(count, width):
    with pytest.raises(PatternError):
        make_patterns(count, width)


def test_pattern_density():
    pattern = make_patterns(2)[0]
    assert g_eval(pattern, math.pi / 2) == 1.0
    assert g_eval(pattern, 3 * math.pi / 2) == -1.0
    assert g_eval(pattern, 0.0) == 0.0
    assert g_eval(pattern, math.pi / 2 + pattern.width) == 0.0
    assert np.array_equal(pattern(np.array([math.pi / 2, math.pi])), [1.0, 0.0])


def test_pattern_index_range():
    with pytest.raises(PatternError):
        CurrentPattern(6, 4, 0.1)


def test_arc_load_is_compatible(disk_mesh, disk_bparam):
    for pattern in make_patterns(8):
        load = pattern_load(disk_mesh, disk_bparam, pattern)
        assert abs(load.sum()) < 1e-12
        assert load.max() > 0 and load.min() < 0
        assert not np.any(load[~disk_mesh.boundary_mask])

        # chord length per radian is constant on a regular polygon
        chord = disk_bparam.edge_lengths[0] / (2 * math.pi / disk_bparam.edge_lengths.shape[0])
        assert load[load > 0].sum() == pytest.approx(pattern.width * chord, rel=1e-12)


def test_traces_have_zero_mean(disk_mesh, disk_bparam):
    _, potentials = forward_solve_many(disk_mesh, 1.0, make_patterns(6), disk_bparam)
    for j, u in enumerate(potentials):
        trace = boundary_trace(u, disk_bparam, j + 1)
        assert trace.index == j + 1
        assert abs(disk_bparam.vertex_weights @ trace.values) < 1e-12


def test_homogeneous_reflection_antisymmetry():
    # 60 boundary vertices, so θ + π is a boundary vertex again
    mesh = generate_disk_mesh(0.105)
    bparam = boundary_param(mesh)
    assert bparam.angles.shape[0] == 60

    trace = boundary_trace(forward_solve(mesh, 1.0, make_patterns(2)[0], bparam), bparam)
    opposite = np.roll(trace.values, -30)
    assert np.max(np.abs(trace.values + opposite)) <= 0.05 * np.max(np.abs(trace.values))


def test_density_pattern(disk_mesh, disk_bparam):
    u = forward_solve(disk_mesh, 1.0, np.cos, disk_bparam)
    assert np.max(np.abs(u.values - disk_mesh.vertices[:, 0])) < 0.02


def test_shared_factorization(disk_mesh, disk_bparam):
    patterns = make_patterns(4)
    solver, potentials = forward_solve_many(disk_mesh, 2.0, patterns, disk_bparam, num_workers=2)
    assert solver.is_direct
    single = forward_solve(disk_mesh, 2.0, patterns[1], disk_bparam)
    assert np.allclose(single.values, potentials[1].values, atol=1e-12)


def test_resample_between_meshes(disk_bparam):
    coarse = boundary_param(generate_disk_mesh(0.3))
    data = BoundaryData(disk_bparam.angles, np.cos(disk_bparam.angles), 2)
    resampled = resample_boundary(data, coarse)
    assert resampled.index == 2
    assert np.array_equal(resampled.angles, coarse.angles)
    assert np.max(np.abs(resampled.values - np.cos(coarse.angles))) < 0.01
    assert abs(coarse.vertex_weights @ resampled.values) < 1e-12


def test_resample_needs_samples(disk_bparam):
    data = BoundaryData([0.0, 1.0], [1.0, -1.0])
    with pytest.raises(ResamplingError):
        resample_boundary(data, disk_bparam)


@pytest.mark.parametrize("angles, values", [
    ([0.0, 1.0], [1.0]),
    ([1.0, 0.5], [1.0, 2.0]),
    ([0.0, 2 * math.pi], [1.0, 2.0]),
    ([0.0, 1.0], [1.0, np.inf]),
])
def test_invalid_boundary_data(angles, values):
    with pytest.raises(BoundaryDataError):
        BoundaryData(angles, values)


def test_cost(disk_mesh, disk_bparam):
    _, potentials = forward_solve_many(disk_mesh, 1.0, make_patterns(4), disk_bparam)
    traces = [boundary_trace(u, disk_bparam, j + 1) for j, u in enumerate(potentials)]
    assert cost(traces, traces, disk_bparam) == 0.0

    shifted = [t.with_values(t.values + 0.1) for t in traces]
    expected = 0.5 * len(traces) * boundary_norm(disk_bparam, np.full(len(traces[0]), 0.1)) ** 2
    assert cost(traces, shifted, disk_bparam) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.01 * disk_bparam.total_length, rel=1e-12)

    with pytest.raises(MeasurementCountError):
        cost(traces, traces[:1], disk_bparam)


def test_cost_ignores_pattern_order(disk_mesh, disk_bparam):
    patterns = make_patterns(4)
    inclusion = true_conductivity(parse_shape("circles 0.35 -0.2 0.25"), disk_mesh)
    _, computed = forward_solve_many(disk_mesh, inclusion, patterns, disk_bparam)
    _, homogeneous = forward_solve_many(disk_mesh, 1.0, patterns, disk_bparam)
    traces = [boundary_trace(u, disk_bparam, j + 1) for j, u in enumerate(computed)]
    measurements = [boundary_trace(u, disk_bparam, j + 1) for j, u in enumerate(homogeneous)]

    J = cost(traces, measurements, disk_bparam)
    assert J > 0
    assert cost(traces[::-1], measurements[::-1], disk_bparam) == pytest.approx(J, rel=1e-12)


def test_shift_preserving_smoothed_step_keeps_potentials(coarse_mesh):
    alpha = 0.01
    # midpoints take the values -2, -0.5 and 1, all outside [0, α) after a 0.3 shift
    q = NodalField(coarse_mesh, np.where(coarse_mesh.vertices[:, 0] > 0.1, 1.0, -2.0))
    shifted = NodalField(coarse_mesh, q.values + 0.3)
    sigma, sigma_shifted = sigma_of_q(q, alpha), sigma_of_q(shifted, alpha)
    assert np.array_equal(sigma.quadrature_values(coarse_mesh), sigma_shifted.quadrature_values(coarse_mesh))

    patterns = make_patterns(6)
    _, potentials = forward_solve_many(coarse_mesh, sigma, patterns)
    _, shifted_potentials = forward_solve_many(coarse_mesh, sigma_shifted, patterns)
    for u, v in zip(potentials, shifted_potentials):
        assert np.allclose(u.values, v.values, atol=1e-12)
