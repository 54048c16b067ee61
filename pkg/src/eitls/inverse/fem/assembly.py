from pathlib import Path
from typing import Callable, Iterable, Tuple

import numpy as np
from scipy import sparse as sp

from eitls.entities.mesh_entities import BoundaryParam, TriMesh
from eitls.utils.index import TWO_PI

from .coefficients import QUADRATURE_WEIGHTS, Coefficient, evaluate_coefficient

_MASS_BLOCK = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0
_EDGE_BLOCK = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0


def _assemble(index: np.ndarray, local: np.ndarray, size: int) -> sp.csr_matrix:
    """Sum (k, d, d) local blocks at the vertex tuples ``index`` (k, d)."""
    d = index.shape[1]
    rows = np.repeat(index, d, axis=1).ravel()
    cols = np.tile(index, (1, d)).ravel()
    matrix = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(size, size)).tocsr()
    # exact symmetry regardless of summation order
    return ((matrix + matrix.T) * 0.5).tocsr()


def assemble_stiffness(mesh: TriMesh, coeff: Coefficient) -> sp.csr_matrix:
    """P1 stiffness matrix of ∫ σ ∇u·∇v dx.

    Args:
        mesh (TriMesh): mesh
        coeff (Coefficient): constant, callable ``(x, y)`` or evaluator, positive

    Returns:
        sp.csr_matrix: symmetric positive semidefinite matrix
    """
    sigma = evaluate_coefficient(mesh, coeff) @ QUADRATURE_WEIGHTS
    grads = mesh.gradients
    local = (mesh.areas * sigma)[:, None, None] * np.einsum("tid,tjd->tij", grads, grads)
    return _assemble(mesh.triangles, local, mesh.vertex_count)


def assemble_mass(mesh: TriMesh) -> sp.csr_matrix:
    local = mesh.areas[:, None, None] * _MASS_BLOCK
    return _assemble(mesh.triangles, local, mesh.vertex_count)


def assemble_boundary_mass(mesh: TriMesh, bparam: BoundaryParam) -> sp.csr_matrix:
    local = bparam.edge_lengths[:, None, None] * _EDGE_BLOCK
    return _assemble(mesh.boundary_edges, local, mesh.vertex_count)


def assemble_boundary_load(mesh: TriMesh, bparam: BoundaryParam, g: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Load ∫ g v ds with the two-point trapezoid rule on every boundary edge."""
    values = np.broadcast_to(np.asarray(g(bparam.angles), dtype=float), bparam.angles.shape)
    return bparam.scatter(bparam.vertex_weights * values)


def assemble_arc_load(mesh: TriMesh,
                      bparam: BoundaryParam,
                      arcs: Iterable[Tuple[float, float, float]]) -> np.ndarray:
    """Exact load of a piecewise constant boundary density.

    Every boundary edge is parametrized linearly in angle; the overlap of each
    ``(start, end, value)`` arc with the edge is integrated against both hats.
    """
    start_angle = bparam.angles
    end_angle = np.roll(bparam.angles, -1)
    end_angle[-1] += TWO_PI
    span = end_angle - start_angle
    length = bparam.edge_lengths

    first = np.zeros_like(length)
    second = np.zeros_like(length)
    for arc_start, arc_end, value in arcs:
        for shift in (-TWO_PI, 0.0, TWO_PI):
            lo = np.maximum(start_angle, arc_start + shift)
            hi = np.minimum(end_angle, arc_end + shift)
            hit = hi > lo
            s0 = np.where(hit, (lo - start_angle) / span, 0.0)
            s1 = np.where(hit, (hi - start_angle) / span, 0.0)
            first += value * length * ((s1 - s0) - 0.5 * (s1 ** 2 - s0 ** 2))
            second += value * length * 0.5 * (s1 ** 2 - s0 ** 2)

    load = np.zeros(mesh.vertex_count)
    np.add.at(load, mesh.boundary_edges[:, 0], first)
    np.add.at(load, mesh.boundary_edges[:, 1], second)
    return load


def dump_matrix(matrix: sp.spmatrix, path: 'str|Path') -> None:
    """Coordinate text dump, one ``i j value`` line per stored entry."""
    coo = sp.coo_matrix(matrix)
    np.savetxt(path, np.column_stack([coo.row, coo.col, coo.data]), fmt=["%d", "%d", "%.17g"])
