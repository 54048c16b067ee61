import logging
from typing import Optional

import numpy as np
from scipy import sparse as sp
from scipy.sparse import linalg as spla

from eitls.entities.eit_entities import NodalField
from eitls.entities.mesh_entities import BoundaryParam, TriMesh
from eitls.inverse.func import run_in_pool
from eitls.utils.constants import COMPATIBILITY_TOL, DIRECT_SOLVER_LIMIT, SOLVER_TOL_DEFAULT

from .errors import SolverConvergenceError


def jacobi_preconditioner(matrix: sp.spmatrix) -> spla.LinearOperator:
    diagonal = matrix.diagonal()
    inverse = np.where(diagonal > 0, 1.0 / np.where(diagonal > 0, diagonal, 1.0), 1.0)
    return spla.LinearOperator(matrix.shape, matvec=lambda x: inverse * x, dtype=float)


def linear_solve(A: sp.spmatrix,
                 b: np.ndarray,
                 tol: float = SOLVER_TOL_DEFAULT,
                 max_iter: Optional[int] = None) -> np.ndarray:
    """Preconditioned conjugate gradients with a true-residual check.

    Args:
        A (sp.spmatrix): symmetric positive (semi)definite matrix, consistent system
        b (np.ndarray): right-hand side
        tol (float, optional): relative residual bound. Defaults to 1e-10.
        max_iter (int, optional): iteration cap. Defaults to 10 × dimension.

    Raises:
        SolverConvergenceError: relative residual above ``tol`` at exit

    Returns:
        np.ndarray: solution
    """
    b = np.asarray(b, dtype=float)
    size = b.shape[0]
    max_iter = 10 * size if max_iter is None else int(max_iter)

    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return np.zeros(size)
    if max_iter <= 0:
        raise SolverConvergenceError(0, 1.0)

    iterations = 0

    def count(_):
        nonlocal iterations
        iterations += 1

    x, _ = spla.cg(A, b, rtol=0.1 * tol, atol=0.0, maxiter=max_iter,
                   M=jacobi_preconditioner(A), callback=count)
    residual = float(np.linalg.norm(b - A @ x)) / b_norm
    logging.debug(f"CG finished in {iterations} iterations, relative residual {residual:.3e}")

    if not residual <= tol:
        raise SolverConvergenceError(iterations, residual)
    return x


def eliminate_boundary(A: sp.spmatrix, boundary_mask: np.ndarray) -> sp.csc_matrix:
    """Zero boundary rows and columns symmetrically and put 1 on their diagonal."""
    keep = sp.diags((~boundary_mask).astype(float))
    fixed = sp.diags(boundary_mask.astype(float))
    return (keep @ A @ keep + fixed).tocsc()


class NeumannSolver:
    """Factor once, solve many pure-Neumann problems with Σ w_i u_i = 0.

    The constraint enters as one Lagrange multiplier row and column carrying
    the boundary vertex weights. Meshes above ``direct_limit`` vertices are
    solved by conjugate gradients on the projected singular system instead.

    Args:
        A (sp.spmatrix): stiffness matrix with constant kernel
        weights (np.ndarray): boundary weights over all vertices
        tol (float, optional): iterative tolerance. Defaults to 1e-10.
        direct_limit (int, optional): vertex count limit for factorization
        num_workers (int, optional): threads used by the iterative fallback
    """

    def __init__(self,
                 A: sp.spmatrix,
                 weights: np.ndarray,
                 tol: float = SOLVER_TOL_DEFAULT,
                 direct_limit: int = DIRECT_SOLVER_LIMIT,
                 num_workers: int = 1) -> None:

        self.matrix = sp.csr_matrix(A)
        self.weights = np.asarray(weights, dtype=float)
        self.tol = tol
        self.num_workers = num_workers
        self.size = self.matrix.shape[0]
        self._total_weight = float(self.weights.sum())

        self._lu = None
        if self.size <= direct_limit:
            border = sp.csr_matrix(self.weights[:, None])
            bordered = sp.bmat([[self.matrix, border], [border.T, None]], format="csc")
            self._lu = spla.splu(bordered)

    @property
    def is_direct(self) -> bool:
        return self._lu is not None

    def project(self, rhs: np.ndarray) -> np.ndarray:
        """Remove the multiple of the weights that makes Σ rhs nonzero."""
        removed = rhs.sum(axis=0) / self._total_weight
        scale = np.maximum(np.abs(rhs).sum(axis=0), np.finfo(float).tiny)
        relative = np.max(np.abs(removed) * self._total_weight / scale)

        if relative > COMPATIBILITY_TOL:
            logging.warning(f"Incompatible Neumann load, removed relative component {relative:.3e}")
        else:
            logging.debug(f"Neumann load compatibility component {relative:.3e} removed")

        return rhs - np.multiply.outer(self.weights, removed)

    def _zero_mean(self, u: np.ndarray) -> np.ndarray:
        return u - np.multiply.outer(np.ones(self.size), (self.weights @ u) / self._total_weight)

    def solve_many(self, rhs: np.ndarray) -> np.ndarray:
        """Solve for every column of ``rhs`` (n, k)."""
        rhs = np.asarray(rhs, dtype=float).reshape(self.size, -1)
        projected = self.project(rhs)

        if self.is_direct:
            bordered = np.vstack([projected, np.zeros((1, projected.shape[1]))])
            solution = self._lu.solve(bordered)[:self.size]
        else:
            columns = run_in_pool(lambda column: linear_solve(self.matrix, column, self.tol),
                                  list(projected.T), self.num_workers)
            solution = np.column_stack(columns)

        return self._zero_mean(solution)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return self.solve_many(np.asarray(rhs, dtype=float)[:, None])[:, 0]


class DirichletSolver:
    """Homogeneous Dirichlet problems for one matrix, boundary rows eliminated."""

    def __init__(self,
                 A: sp.spmatrix,
                 mesh: TriMesh,
                 tol: float = SOLVER_TOL_DEFAULT,
                 direct_limit: int = DIRECT_SOLVER_LIMIT) -> None:

        self.mask = mesh.boundary_mask
        self.matrix = eliminate_boundary(A, self.mask)
        self.tol = tol
        self._lu = spla.splu(self.matrix) if mesh.vertex_count <= direct_limit else None

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.array(rhs, dtype=float)
        rhs[self.mask] = 0.0
        solution = self._lu.solve(rhs) if self._lu is not None else linear_solve(self.matrix, rhs, self.tol)
        solution[self.mask] = 0.0
        return solution


def solve_neumann_zero_mean(A: sp.spmatrix,
                            rhs: np.ndarray,
                            bparam: BoundaryParam,
                            mesh: TriMesh,
                            tol: float = SOLVER_TOL_DEFAULT,
                            direct_limit: int = DIRECT_SOLVER_LIMIT) -> NodalField:
    solver = NeumannSolver(A, bparam.full_weights(), tol, direct_limit)
    return NodalField(mesh, solver.solve(rhs), "u")


def solve_dirichlet_zero(A: sp.spmatrix,
                         rhs: np.ndarray,
                         mesh: TriMesh,
                         tol: float = SOLVER_TOL_DEFAULT,
                         direct_limit: int = DIRECT_SOLVER_LIMIT) -> NodalField:
    return NodalField(mesh, DirichletSolver(A, mesh, tol, direct_limit).solve(rhs), "q")
