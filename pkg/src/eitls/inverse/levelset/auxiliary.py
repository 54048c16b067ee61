import logging
import math

import numpy as np

from eitls.entities.eit_entities import NodalField
from eitls.entities.mesh_entities import TriMesh
from eitls.inverse.fem.assembly import assemble_mass, assemble_stiffness
from eitls.inverse.fem.solvers import DirichletSolver
from eitls.utils.constants import DIRECT_SOLVER_LIMIT, SOLVER_TOL_DEFAULT


class LevelSetOperator:
    """Discrete -γΔ + I with q = 0 on the boundary.

    The same factorization serves the level-set solve and its adjoint, the
    operator being symmetric.

    Args:
        mesh (TriMesh): mesh
        gamma (float): smoothing parameter, > 0
    """

    def __init__(self,
                 mesh: TriMesh,
                 gamma: float,
                 tol: float = SOLVER_TOL_DEFAULT,
                 direct_limit: int = DIRECT_SOLVER_LIMIT) -> None:

        if not (math.isfinite(gamma) and gamma > 0):
            raise ValueError(f"Invalid gamma: {gamma}, must be a positive number")

        self.mesh = mesh
        self.gamma = gamma
        self.stiffness = assemble_stiffness(mesh, 1.0)
        self.mass = assemble_mass(mesh)
        self.matrix = (gamma * self.stiffness + self.mass).tocsr()
        self._solver = DirichletSolver(self.matrix, mesh, tol, direct_limit)

        logging.debug(f"Level-set operator factored, gamma={gamma}, n={mesh.vertex_count}")

    def solve(self, load: np.ndarray) -> np.ndarray:
        return self._solver.solve(load)

    def level_set(self, f: NodalField) -> NodalField:
        return NodalField(self.mesh, self.solve(self.mass @ f.values), "q")

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        """L² inner product aᵀMb."""
        return float(a @ (self.mass @ b))

    def gradient_norm(self, q: NodalField) -> float:
        """‖∇q‖_{L²}."""
        return math.sqrt(max(float(q.values @ (self.stiffness @ q.values)), 0.0))


def solve_level_set(f: NodalField,
                    gamma: float,
                    mesh: TriMesh,
                    tol: float = SOLVER_TOL_DEFAULT,
                    direct_limit: int = DIRECT_SOLVER_LIMIT) -> NodalField:
    """Level set q of the control f: -γΔq + q = f, q = 0 on the boundary."""
    return LevelSetOperator(mesh, gamma, tol, direct_limit).level_set(f)
