import logging
import math
from typing import List

import numpy as np

from eitls.entities.eit_entities import CurrentPattern
from eitls.utils.constants import ELECTRODE_WIDTH_DEFAULT
from eitls.utils.index import TWO_PI

from .errors import PatternError


def make_patterns(electrode_count: int, width: float = ELECTRODE_WIDTH_DEFAULT) -> List[CurrentPattern]:
    """Opposite-electrode current patterns, one per electrode pair.

    Args:
        electrode_count (int): even number E ≥ 2 of equidistant electrodes
        width (float, optional): electrode arc width in radians. Defaults to π/20.

    Returns:
        List[CurrentPattern]: E/2 patterns, the first with its source at the top
    """
    if isinstance(electrode_count, bool) or not isinstance(electrode_count, (int, np.integer)):
        raise PatternError(electrode_count, width, "Electrode count must be an integer")
    if electrode_count < 2 or electrode_count % 2:
        raise PatternError(electrode_count, width, "Electrode count must be even and >= 2")
    if not (math.isfinite(width) and width > 0) or electrode_count * width >= TWO_PI:
        raise PatternError(electrode_count, width, "Electrodes overlap or have no width")

    patterns = [CurrentPattern(int(electrode_count), j, float(width)) for j in range(1, electrode_count // 2 + 1)]
    logging.debug(f"{len(patterns)} current patterns for {electrode_count} electrodes")
    return patterns


def g_eval(pattern: CurrentPattern, angle: 'np.ndarray|float') -> 'np.ndarray|float':
    """Applied current density: +1 on the source arc, -1 on the sink arc, 0 elsewhere."""
    return pattern(angle)
