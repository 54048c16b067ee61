import logging
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from eitls.entities.eit_entities import CurrentPattern, NodalField
from eitls.entities.mesh_entities import BoundaryParam, TriMesh
from eitls.inverse.fem.assembly import assemble_arc_load, assemble_boundary_load, assemble_stiffness
from eitls.inverse.fem.coefficients import Coefficient
from eitls.inverse.fem.solvers import NeumannSolver
from eitls.inverse.mesh.generators import boundary_param
from eitls.utils.constants import DIRECT_SOLVER_LIMIT, SOLVER_TOL_DEFAULT

Pattern = Union[CurrentPattern, Callable[[np.ndarray], np.ndarray]]


def pattern_load(mesh: TriMesh, bparam: BoundaryParam, pattern: Pattern) -> np.ndarray:
    """Boundary load of an electrode pattern (exact arcs) or of a density g(θ)."""
    if isinstance(pattern, CurrentPattern):
        return assemble_arc_load(mesh, bparam, pattern.arcs())
    return assemble_boundary_load(mesh, bparam, pattern)


def forward_solve_many(mesh: TriMesh,
                       sigma: Coefficient,
                       patterns: Sequence[Pattern],
                       bparam: Optional[BoundaryParam] = None,
                       tol: float = SOLVER_TOL_DEFAULT,
                       direct_limit: int = DIRECT_SOLVER_LIMIT,
                       num_workers: int = 1) -> Tuple[NeumannSolver, List[NodalField]]:
    """All forward solves for one conductivity, sharing one factorization.

    Returns:
        Tuple[NeumannSolver, List[NodalField]]: solver, reusable by the adjoint, and u_1..u_M
    """
    bparam = boundary_param(mesh) if bparam is None else bparam
    solver = NeumannSolver(assemble_stiffness(mesh, sigma), bparam.full_weights(), tol, direct_limit, num_workers)
    loads = np.column_stack([pattern_load(mesh, bparam, pattern) for pattern in patterns])
    solutions = solver.solve_many(loads)
    logging.debug(f"{len(patterns)} forward solves on {mesh.vertex_count} vertices")
    return solver, [NodalField(mesh, solutions[:, j], f"u_{j + 1}") for j in range(solutions.shape[1])]


def forward_solve(mesh: TriMesh,
                  sigma: Coefficient,
                  pattern: Pattern,
                  bparam: Optional[BoundaryParam] = None,
                  tol: float = SOLVER_TOL_DEFAULT,
                  direct_limit: int = DIRECT_SOLVER_LIMIT) -> NodalField:
    """Potential u of -∇·σ∇u = 0 with flux ``pattern`` and zero boundary mean."""
    _, (u,) = forward_solve_many(mesh, sigma, [pattern], bparam, tol, direct_limit)
    return u
