import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from eitls.entities.eit_entities import BoundaryData, CurrentPattern, NodalField
from eitls.entities.mesh_entities import TriMesh
from eitls.inverse.adjoint.adjoint import AdjointBundle, GradChain, compute_adjoint
from eitls.inverse.fem.assembly import assemble_stiffness
from eitls.inverse.fem.solvers import NeumannSolver
from eitls.inverse.forward.errors import MeasurementCountError
from eitls.inverse.forward.forward import pattern_load
from eitls.inverse.forward.traces import boundary_mass_apply, resample_boundary
from eitls.inverse.levelset.auxiliary import LevelSetOperator
from eitls.inverse.levelset.smoothing import sigma_of_q
from eitls.inverse.mesh.generators import boundary_param

from .config import ReconstructionConfig


@dataclass(frozen=True, eq=False)
class Evaluation:
    f: NodalField
    J: float
    chain: GradChain

    @property
    def q(self) -> NodalField:
        return self.chain.q


class ReconstructionProblem:
    """Discrete cost J(f) and its adjoint gradient on one reconstruction mesh.

    Measurements are resampled once onto the mesh boundary. Every call to
    ``evaluate`` advances an evaluation counter; a gradient can only be
    taken for the most recent evaluation.
    """

    def __init__(self,
                 config: ReconstructionConfig,
                 mesh: TriMesh,
                 patterns: Sequence[CurrentPattern],
                 measurements: Sequence[BoundaryData]) -> None:

        if len(patterns) != len(measurements):
            raise MeasurementCountError(len(patterns), len(measurements))

        self.config = config
        self.mesh = mesh
        self.patterns = list(patterns)
        self.bparam = boundary_param(mesh)
        self.weights = self.bparam.full_weights()

        self.data = np.column_stack([
            (m if np.array_equal(m.angles, self.bparam.angles) else resample_boundary(m, self.bparam)).values
            for m in measurements
        ])
        self.loads = np.column_stack([pattern_load(mesh, self.bparam, p) for p in self.patterns])
        self.smoothing = config.smoothing
        self.operator = LevelSetOperator(mesh, self.smoothing.gamma, config.solver_tol, config.direct_limit)

        self.counter = 0
        self.last: Optional[Evaluation] = None

    @property
    def measurement_count(self) -> int:
        return len(self.patterns)

    def _boundary_cost(self, residuals: np.ndarray) -> float:
        return 0.5 * sum(float(residuals[:, j] @ boundary_mass_apply(self.bparam, residuals[:, j]))
                         for j in range(residuals.shape[1]))

    def evaluate(self, f_values: np.ndarray) -> Evaluation:
        f = NodalField(self.mesh, f_values, "f")
        q = self.operator.level_set(f)
        sigma = sigma_of_q(q, self.smoothing.alpha)

        solver = NeumannSolver(assemble_stiffness(self.mesh, sigma), self.weights,
                               self.config.solver_tol, self.config.direct_limit, self.config.num_workers)
        potentials = solver.solve_many(self.loads)

        traces = potentials[self.bparam.vertices]
        traces = traces - (self.bparam.vertex_weights @ traces) / self.bparam.vertex_weights.sum()
        residuals = traces - self.data

        self.counter += 1
        u = [NodalField(self.mesh, potentials[:, j], f"u_{j + 1}") for j in range(potentials.shape[1])]
        chain = GradChain(self.counter, q, sigma, u, residuals, solver)
        self.last = Evaluation(f, self._boundary_cost(residuals), chain)
        logging.debug(f"Evaluation {self.counter}: J={self.last.J:.6e}")
        return self.last

    def cost(self, f_values: np.ndarray) -> float:
        return self.evaluate(f_values).J

    def gradient(self, evaluation: Evaluation) -> AdjointBundle:
        return compute_adjoint(evaluation.chain, self.operator, self.bparam, self.counter)

    def directional_derivative(self, bundle: AdjointBundle, direction: np.ndarray) -> float:
        """dJ along ``direction`` = directionᵀ M λ."""
        return self.operator.inner(direction, bundle.grad.values)
