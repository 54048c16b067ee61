import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from eitls.utils.constants import LINE_SEARCH

from .errors import LineSearchError, ReconstructionError


@dataclass(frozen=True)
class LineSearchResult:
    step: float
    backtracks: int
    J: float


def line_search(f: np.ndarray,
                grad: np.ndarray,
                J0: float,
                evaluate_J: Callable[[np.ndarray], float],
                grad_norm_sq: float,
                initial_step: float,
                shrink: float = LINE_SEARCH["SHRINK"],
                armijo_c: float = LINE_SEARCH["ARMIJO_C"],
                max_backtracks: int = int(LINE_SEARCH["MAX_BACKTRACKS"])) -> LineSearchResult:
    """Armijo backtracking along -grad.

    Tries s, shrink·s, ... and accepts the first step with
    J(f - s·grad) ≤ J0 - c·s·‖grad‖²_M and a strict decrease.

    Args:
        f (np.ndarray): current control
        grad (np.ndarray): gradient representative
        J0 (float): cost at ``f``
        evaluate_J (Callable): cost of a trial control
        grad_norm_sq (float): ‖grad‖²_M = gradᵀ M grad
        initial_step (float): first trial step

    Raises:
        ReconstructionError: zero gradient or non-positive initial step
        LineSearchError: no acceptable step after ``max_backtracks`` reductions

    Returns:
        LineSearchResult: accepted step, number of reductions and trial cost
    """
    if not np.any(grad) or not grad_norm_sq > 0:
        raise ReconstructionError("line search needs a nonzero gradient")
    if not (math.isfinite(initial_step) and initial_step > 0):
        raise ReconstructionError(f"invalid initial step {initial_step}")

    step = initial_step
    for backtracks in range(max_backtracks + 1):
        trial = evaluate_J(f - step * grad)
        if math.isfinite(trial) and trial < J0 and trial <= J0 - armijo_c * step * grad_norm_sq:
            return LineSearchResult(step, backtracks, trial)

        logging.debug(f"Step {step:.3e} rejected (J={trial:.6e}, J0={J0:.6e})")
        if backtracks < max_backtracks:
            step *= shrink

    raise LineSearchError(max_backtracks, step)
