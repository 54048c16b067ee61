import logging
import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from eitls.entities.eit_entities import (BoundaryData, ConvergenceRecord, ConvergenceRow, CurrentPattern,
                                         NodalField, ReconstructionResult, ShapeSpec)
from eitls.entities.mesh_entities import TriMesh
from eitls.inverse.adjoint.adjoint import AdjointBundle
from eitls.inverse.levelset.shapes import chi_quadrature
from eitls.inverse.levelset.smoothing import heaviside_field, sigma_field
from eitls.utils.constants import INITIAL_GUESS, TERMINATION

from .config import ReconstructionConfig
from .errors import ConfigurationError, LineSearchError, ReconstructionError
from .line_search import line_search
from .problem import Evaluation, ReconstructionProblem

IterateCallback = Callable[[int, Evaluation, AdjointBundle], None]


def initial_control(mesh: TriMesh,
                    radius: float = INITIAL_GUESS["RADIUS"],
                    center: Tuple[float, float] = INITIAL_GUESS["CENTER"]) -> NodalField:
    """Indicator of a closed disk at the vertices: 1 inside or on the circle, 0 outside."""
    if not (math.isfinite(radius) and radius > 0):
        raise ConfigurationError(f"initial radius must be positive, got {radius}")

    distance = np.linalg.norm(mesh.vertices - np.asarray(center, dtype=float), axis=1)
    return NodalField(mesh, (distance <= radius + 1e-12).astype(float), "f")


def reconstruction_error(H_field: NodalField, truth: ShapeSpec, mesh: TriMesh) -> float:
    """Relative L² distance ‖χ_D - H‖ / ‖χ_D‖ on the edge-midpoint rule.

    The denominator is the exact √area(D).
    """
    if not truth.area > 0:
        raise ReconstructionError("truth shape has zero area")

    difference = chi_quadrature(truth, mesh) - H_field.at_midpoints()
    squared = float(mesh.areas @ (difference ** 2).mean(axis=1))
    return math.sqrt(squared / truth.area)


def reconstruct(config: ReconstructionConfig,
                mesh: TriMesh,
                patterns: Sequence[CurrentPattern],
                measurements: Sequence[BoundaryData],
                truth: Optional[ShapeSpec] = None,
                on_iterate: Optional[IterateCallback] = None,
                initial: Optional[NodalField] = None) -> ReconstructionResult:
    """Steepest descent on the control f with Armijo backtracking.

    Every pass computes the gradient at f^k and records a row; the run
    stops when ‖grad‖_∞ drops below the stopping tolerance, when the line
    search fails or after ``max_iters`` accepted updates.

    Args:
        config (ReconstructionConfig): run parameters
        mesh (TriMesh): reconstruction mesh
        patterns (Sequence[CurrentPattern]): current patterns, one per measurement
        measurements (Sequence[BoundaryData]): boundary data m_j
        truth (ShapeSpec, optional): phantom used only to report ε_err
        on_iterate (IterateCallback, optional): called with (k, evaluation, bundle)
        initial (NodalField, optional): starting control, defaults to the disk guess

    Returns:
        ReconstructionResult: final fields and convergence record
    """
    problem = ReconstructionProblem(config, mesh, patterns, measurements)
    f = initial.values if initial is not None else initial_control(mesh, config.init_radius, config.init_center).values

    tolerance = config.stop_tolerance
    first_step = 0.1 * float(np.max(np.abs(f))) + 0.01
    record = ConvergenceRecord()
    state = problem.evaluate(f)
    previous_step: Optional[float] = None

    logging.info(f"Reconstruction start: M={problem.measurement_count}, gamma={config.gamma}, "
                 f"alpha={config.alpha}, tol={tolerance:.3e}, J0={state.J:.6e}")

    k = 0
    while True:
        bundle = problem.gradient(state)
        grad = bundle.grad.values
        grad_inf = bundle.grad_inf
        eps_err = reconstruction_error(heaviside_field(state.q, config.alpha), truth, mesh) if truth is not None else None

        if on_iterate is not None:
            on_iterate(k, state, bundle)

        if grad_inf < tolerance:
            record.append(ConvergenceRow(k, state.J, grad_inf, 0.0, 0, eps_err))
            record.finish(TERMINATION["CONVERGED"])
            break

        if k >= config.max_iters:
            record.finish(TERMINATION["MAX_ITERS"])
            break

        initial_step = config.step_growth * previous_step if previous_step else first_step / grad_inf
        try:
            accepted = line_search(f, grad, state.J, problem.cost,
                                   problem.operator.inner(grad, grad), initial_step,
                                   config.shrink, config.armijo_c, config.max_backtracks)
        except LineSearchError as error:
            logging.warning(f"Line search failed at iteration {k}: {error}")
            record.append(ConvergenceRow(k, state.J, grad_inf, 0.0, error.backtracks, eps_err))
            record.finish(TERMINATION["LINE_SEARCH_FAILED"])
            break

        record.append(ConvergenceRow(k, state.J, grad_inf, accepted.step, accepted.backtracks, eps_err))
        if k % config.log_every == 0:
            logging.info(f"iter {k}: J={state.J:.6e} |grad|={grad_inf:.3e} step={accepted.step:.3e}"
                         + (f" eps={eps_err:.4f}" if eps_err is not None else ""))

        f = f - accepted.step * grad
        # the accepted trial was the last evaluation
        state = problem.last
        previous_step = accepted.step
        k += 1

    H = heaviside_field(state.q, config.alpha)
    result = ReconstructionResult(
        f=NodalField(mesh, f, "f"),
        q=state.q.renamed("q"),
        H=H,
        sigma=sigma_field(state.q, config.alpha),
        lam=bundle.lam,
        record=record,
        J_final=state.J,
        grad_inf_final=bundle.grad_inf,
        eps_err=reconstruction_error(H, truth, mesh) if truth is not None else None,
    )
    logging.info(f"Reconstruction finished ({record.reason}) after {record.iterations} updates: "
                 f"J={result.J_final:.6e}" + (f", eps={result.eps_err:.4f}" if truth is not None else ""))
    return result
