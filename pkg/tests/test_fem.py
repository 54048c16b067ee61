import math

import numpy as np
import pytest
from scipy import sparse as sp

from conftest import l2_norm, nodal
from eitls.entities.mesh_entities import TriMesh
from eitls.inverse.fem.assembly import (assemble_boundary_load, assemble_boundary_mass, assemble_mass,
                                        assemble_stiffness, dump_matrix)
from eitls.inverse.fem.coefficients import FunctionCoefficient, PiecewiseCoefficient
from eitls.inverse.fem.errors import CoefficientError, SolverConvergenceError
from eitls.inverse.fem.solvers import (DirichletSolver, NeumannSolver, linear_solve, solve_dirichlet_zero,
                                       solve_neumann_zero_mean)
from eitls.inverse.levelset.auxiliary import LevelSetOperator
from eitls.inverse.mesh.generators import boundary_param, generate_disk_mesh
from eitls.utils.index import remove_weighted_mean


@pytest.fixture(scope="module")
def reference_triangle():
    return TriMesh([[0, 0], [1, 0], [0, 1]], [[0, 1, 2]])


@pytest.fixture(scope="module")
def inscribed_triangle():
    t = 2 * math.pi * np.arange(3) / 3
    return TriMesh(np.column_stack([np.cos(t), np.sin(t)]), [[0, 1, 2]])


def test_reference_element_stiffness(reference_triangle):
    A = assemble_stiffness(reference_triangle, 1.0).toarray()
    expected = np.array([[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]])
    assert np.allclose(A, expected, atol=1e-14)


def test_reference_element_mass(reference_triangle):
    M = assemble_mass(reference_triangle).toarray()
    expected = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 24.0
    assert np.allclose(M, expected, atol=1e-15)


def test_stiffness_is_linear_in_coefficient(disk_mesh):
    A1 = assemble_stiffness(disk_mesh, 1.0)
    A2 = assemble_stiffness(disk_mesh, 2.0)
    assert abs(A2 - 2.0 * A1).max() == 0.0


def test_stiffness_symmetry_and_kernel(disk_mesh):
    coeff = FunctionCoefficient(lambda x, y: 1.0 + x ** 2 + 0.5 * y)
    A = assemble_stiffness(disk_mesh, coeff)
    assert abs(A - A.T).max() == 0.0

    row_max = abs(A).max()
    assert np.max(np.abs(A @ np.ones(disk_mesh.vertex_count))) <= 1e-12 * row_max

    # positive semidefinite on a few random vectors
    rng = np.random.default_rng(3)
    for _ in range(5):
        v = rng.standard_normal(disk_mesh.vertex_count)
        assert v @ (A @ v) >= 0


def test_piecewise_coefficient(disk_mesh):
    values = np.where(disk_mesh.centroids[:, 0] > 0, 2.0, 1.0)
    A = assemble_stiffness(disk_mesh, PiecewiseCoefficient(values))
    assert abs(A - A.T).max() == 0.0


@pytest.mark.parametrize("coeff", [0.0, -1.0, float("nan"), lambda x, y: x])
def test_invalid_coefficient(disk_mesh, coeff):
    with pytest.raises(CoefficientError):
        assemble_stiffness(disk_mesh, coeff)


def test_mass_total(disk_mesh):
    M = assemble_mass(disk_mesh)
    ones = np.ones(disk_mesh.vertex_count)
    assert ones @ (M @ ones) == pytest.approx(disk_mesh.total_area, rel=1e-12)
    assert ones @ (M @ ones) == pytest.approx(math.pi, rel=0.005)


def test_single_edge_block(inscribed_triangle):
    bparam = boundary_param(inscribed_triangle)
    B = assemble_boundary_mass(inscribed_triangle, bparam).toarray()
    L = math.sqrt(3.0)
    assert B[0, 0] == pytest.approx(2 * L / 3)
    assert B[0, 1] == pytest.approx(L / 6)


def test_boundary_mass(disk_mesh, disk_bparam):
    B = assemble_boundary_mass(disk_mesh, disk_bparam)
    ones = np.ones(disk_mesh.vertex_count)
    assert ones @ (B @ ones) == pytest.approx(disk_bparam.total_length, rel=1e-12)
    interior = ~disk_mesh.boundary_mask
    assert sp.csr_matrix(B)[np.flatnonzero(interior)].nnz == 0


def test_boundary_load(disk_mesh, disk_bparam):
    zero = assemble_boundary_load(disk_mesh, disk_bparam, lambda theta: 0.0 * theta)
    assert not np.any(zero)

    one = assemble_boundary_load(disk_mesh, disk_bparam, lambda theta: np.ones_like(theta))
    assert one.sum() == pytest.approx(disk_bparam.total_length, abs=1e-12)
    assert not np.any(one[~disk_mesh.boundary_mask])

    cosine = assemble_boundary_load(disk_mesh, disk_bparam, np.cos)
    assert abs(cosine.sum()) < 0.1 ** 2


def test_dump_matrix(tmp_path, reference_triangle):
    path = tmp_path / "mass.txt"
    dump_matrix(assemble_mass(reference_triangle), path)
    rows = np.loadtxt(path)
    assert rows.shape == (9, 3)
    assert rows[:, 2].sum() == pytest.approx(0.5)


def test_linear_solve_identity():
    b = np.array([1.0, -2.0, 3.0])
    assert np.allclose(linear_solve(sp.identity(3, format="csr"), b), b)


def test_linear_solve_mass(disk_mesh):
    M = assemble_mass(disk_mesh)
    b = np.random.default_rng(0).standard_normal(disk_mesh.vertex_count)
    x = linear_solve(M, b, tol=1e-10)
    assert np.linalg.norm(M @ x - b) <= 1e-10 * np.linalg.norm(b)


def test_linear_solve_reports_non_convergence(disk_mesh):
    with pytest.raises(SolverConvergenceError) as error:
        linear_solve(assemble_mass(disk_mesh), np.ones(disk_mesh.vertex_count), max_iter=0)
    assert error.value.iterations == 0


def _cosine_error(h):
    mesh = generate_disk_mesh(h)
    bparam = boundary_param(mesh)
    A = assemble_stiffness(mesh, 1.0)
    u = solve_neumann_zero_mean(A, assemble_boundary_load(mesh, bparam, np.cos), bparam, mesh)
    exact = nodal(mesh, lambda x, y: x).values
    return l2_norm(mesh, u.values - exact), u, bparam


def test_neumann_cosine_solution():
    coarse, _, _ = _cosine_error(0.2)
    fine, u, bparam = _cosine_error(0.1)
    assert fine < 0.02
    assert coarse / fine > 2.5
    assert abs(bparam.full_weights() @ u.values) <= 1e-10 * u.max_abs


def test_neumann_zero_rhs(disk_mesh, disk_bparam):
    A = assemble_stiffness(disk_mesh, 1.0)
    u = solve_neumann_zero_mean(A, np.zeros(disk_mesh.vertex_count), disk_bparam, disk_mesh)
    assert not np.any(u.values)


def test_neumann_projects_incompatible_load(disk_mesh, disk_bparam):
    A = assemble_stiffness(disk_mesh, 1.0)
    solver = NeumannSolver(A, disk_bparam.full_weights())
    load = assemble_boundary_load(disk_mesh, disk_bparam, np.cos)
    shifted = load + 0.3 * disk_bparam.full_weights()
    assert np.allclose(solver.solve(shifted), solver.solve(load), atol=1e-10)


def test_neumann_solution_ignores_constant_shift(disk_mesh, disk_bparam):
    A = assemble_stiffness(disk_mesh, 1.0)
    weights = disk_bparam.full_weights()
    solver = NeumannSolver(A, weights)
    u = solver.solve(assemble_boundary_load(disk_mesh, disk_bparam, np.cos))

    shifted = u + 3.7
    assert np.allclose(solver.solve(A @ shifted), u, atol=1e-10)
    assert np.allclose(remove_weighted_mean(shifted, weights), u, atol=1e-10)


def test_neumann_iterative_matches_direct(coarse_mesh):
    bparam = boundary_param(coarse_mesh)
    A = assemble_stiffness(coarse_mesh, 1.0)
    load = assemble_boundary_load(coarse_mesh, bparam, np.sin)
    direct = NeumannSolver(A, bparam.full_weights())
    iterative = NeumannSolver(A, bparam.full_weights(), direct_limit=1)
    assert direct.is_direct and not iterative.is_direct
    assert np.allclose(iterative.solve(load), direct.solve(load), atol=1e-8)


def test_dirichlet_solution_vanishes_on_boundary(disk_mesh):
    A = assemble_stiffness(disk_mesh, 1.0) + assemble_mass(disk_mesh)
    q = solve_dirichlet_zero(A, np.ones(disk_mesh.vertex_count), disk_mesh)
    assert np.all(q.values[disk_mesh.boundary_mask] == 0.0)
    assert np.all(q.values >= -1e-10)
    assert q.max_abs > 0

    assert not np.any(DirichletSolver(A, disk_mesh).solve(np.zeros(disk_mesh.vertex_count)))


def _manufactured_error(h, gamma):
    mesh = generate_disk_mesh(h)
    operator = LevelSetOperator(mesh, gamma)
    f = nodal(mesh, lambda x, y: 1 - x ** 2 - y ** 2 + 4 * gamma)
    q = operator.level_set(f)
    error = q.values - nodal(mesh, lambda x, y: 1 - x ** 2 - y ** 2).values
    return l2_norm(mesh, error), np.max(np.abs(error)), math.sqrt(error @ (operator.matrix @ error))


def test_dirichlet_manufactured_order():
    coarse, _, _ = _manufactured_error(0.2, 0.05)
    fine, fine_max, _ = _manufactured_error(0.1, 0.05)
    assert fine_max < 0.02
    assert coarse / fine > 2.5


def test_dirichlet_energy_error_rate():
    _, _, coarse = _manufactured_error(0.1, 0.05)
    _, _, fine = _manufactured_error(0.05, 0.05)
    assert coarse / fine >= 1.8


@pytest.mark.slow
def test_neumann_cosine_order_on_fine_meshes():
    errors = [_cosine_error(h)[0] for h in (0.1, 0.05, 0.025)]
    assert errors[0] / errors[1] >= 3.5
    assert errors[1] / errors[2] >= 3.5


@pytest.mark.slow
def test_dirichlet_manufactured_order_small_gamma():
    errors = [_manufactured_error(h, 0.001)[1] for h in (0.1, 0.05, 0.025)]
    assert errors[0] / errors[1] >= 3.5
    assert errors[1] / errors[2] >= 3.5
