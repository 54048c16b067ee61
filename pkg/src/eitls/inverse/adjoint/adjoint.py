import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from eitls.entities.eit_entities import BoundaryData, NodalField
from eitls.entities.mesh_entities import BoundaryParam, TriMesh
from eitls.inverse.fem.assembly import assemble_stiffness
from eitls.inverse.fem.coefficients import MIDPOINT_BARYCENTRIC, Coefficient
from eitls.inverse.fem.solvers import NeumannSolver
from eitls.inverse.forward.traces import boundary_mass_apply, boundary_trace, resample_boundary
from eitls.inverse.levelset.auxiliary import LevelSetOperator
from eitls.inverse.levelset.smoothing import LevelSetCoefficient, delta_alpha
from eitls.utils.constants import DIRECT_SOLVER_LIMIT, SOLVER_TOL_DEFAULT

from .errors import StaleEvaluationError


@dataclass(frozen=True, eq=False)
class GradChain:
    """Everything one gradient evaluation needs, all built from the same control.

    Args:
        counter (int): evaluation number that produced the chain
        q (NodalField): level set
        sigma (LevelSetCoefficient): σ = 1 + H_α(q)
        u (List[NodalField]): forward potentials
        residuals (np.ndarray): (boundary vertices, M) trace minus measurement
        solver (NeumannSolver): factorization of the forward matrix
    """

    counter: int
    q: NodalField
    sigma: LevelSetCoefficient
    u: List[NodalField]
    residuals: np.ndarray
    solver: NeumannSolver

    def check(self, current_counter: int) -> None:
        if self.counter != current_counter:
            raise StaleEvaluationError(self.counter, current_counter)


@dataclass(frozen=True, eq=False)
class AdjointBundle:
    z: List[NodalField]
    lam: NodalField
    grad: NodalField

    @property
    def grad_inf(self) -> float:
        return self.grad.max_abs


def residual_loads(bparam: BoundaryParam, residuals: np.ndarray) -> np.ndarray:
    """(n, M) loads ∫ (u_j - m_j) v ds from (boundary vertices, M) residuals."""
    loads = np.zeros((bparam.vertex_count, residuals.shape[1]))
    for j in range(residuals.shape[1]):
        loads[bparam.vertices, j] = boundary_mass_apply(bparam, residuals[:, j])
    return loads


def adjoint_forward(mesh: TriMesh,
                    sigma: Coefficient,
                    u: NodalField,
                    measurement: BoundaryData,
                    bparam: BoundaryParam,
                    solver: Optional[NeumannSolver] = None,
                    tol: float = SOLVER_TOL_DEFAULT,
                    direct_limit: int = DIRECT_SOLVER_LIMIT) -> NodalField:
    """Adjoint state z_j: a(z, v) = ∫ (u_j - m_j) v ds with zero boundary mean.

    Pass the forward ``solver`` to reuse its factorization; it must have been
    built for the same σ.
    """
    if not np.array_equal(measurement.angles, bparam.angles):
        measurement = resample_boundary(measurement, bparam)

    residual = boundary_trace(u, bparam).values - measurement.values
    if solver is None:
        solver = NeumannSolver(assemble_stiffness(mesh, sigma), bparam.full_weights(), tol, direct_limit)

    load = residual_loads(bparam, residual[:, None])[:, 0]
    return NodalField(mesh, solver.solve(load), f"z_{measurement.index}")


def adjoint_source(q: NodalField,
                   alpha: float,
                   u_list: Sequence[NodalField],
                   z_list: Sequence[NodalField]) -> np.ndarray:
    """Nodal load Σ_j ∫ δ_α(q) ∇u_j·∇z_j φ_i dx on the edge-midpoint rule."""
    mesh = q.mesh
    products = np.zeros(mesh.triangle_count)
    for u, z in zip(u_list, z_list):
        products += np.einsum("td,td->t", u.gradients(), z.gradients())

    delta = delta_alpha(q.at_midpoints(), alpha)
    local = (mesh.areas / 3.0 * products)[:, None] * (delta @ MIDPOINT_BARYCENTRIC)
    return np.bincount(mesh.triangles.ravel(), weights=local.ravel(), minlength=mesh.vertex_count)


def adjoint_levelset(mesh: TriMesh,
                     gamma: float,
                     source: np.ndarray,
                     operator: Optional[LevelSetOperator] = None) -> NodalField:
    """Level-set adjoint λ, zero on the boundary.

    The cost decreases along +source in q, hence the negated load.
    """
    operator = LevelSetOperator(mesh, gamma) if operator is None else operator
    return NodalField(mesh, operator.solve(-np.asarray(source, dtype=float)), "lambda")


def gradient(lam: NodalField,
             chain: Optional[GradChain] = None,
             current_counter: Optional[int] = None) -> NodalField:
    """L² representative of dJ/df; the derivative along w is wᵀMλ."""
    if chain is not None and current_counter is not None:
        chain.check(current_counter)
    return lam.renamed("grad")


def compute_adjoint(chain: GradChain,
                    operator: LevelSetOperator,
                    bparam: BoundaryParam,
                    current_counter: int) -> AdjointBundle:
    """Adjoint states, λ and the gradient for the evaluation held in ``chain``."""
    chain.check(current_counter)

    states = chain.solver.solve_many(residual_loads(bparam, chain.residuals))
    mesh = chain.q.mesh
    z = [NodalField(mesh, states[:, j], f"z_{j + 1}") for j in range(states.shape[1])]

    source = adjoint_source(chain.q, chain.sigma.alpha, chain.u, z)
    lam = adjoint_levelset(mesh, operator.gamma, source, operator)
    grad = gradient(lam, chain, current_counter)

    logging.debug(f"Adjoint evaluation {chain.counter}: |grad|_inf={grad.max_abs:.3e}")
    return AdjointBundle(z, lam, grad)
