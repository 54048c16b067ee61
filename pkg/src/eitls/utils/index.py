import math
from typing import Iterable, List

import numpy as np

from .constants import FLOAT_FORMAT

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: 'np.ndarray|float') -> 'np.ndarray|float':
    """Map angles onto [0, 2π).

    Args:
        theta (np.ndarray|float): angles in radians

    Returns:
        np.ndarray|float: wrapped angles
    """
    wrapped = np.mod(theta, TWO_PI)
    # np.mod can return exactly 2π for tiny negative inputs
    wrapped = np.where(wrapped >= TWO_PI, 0.0, wrapped)
    return float(wrapped) if np.ndim(wrapped) == 0 else wrapped


def weighted_mean(values: np.ndarray, weights: np.ndarray) -> float:
    """Weighted mean Σ w_i v_i / Σ w_i.

    Args:
        values (np.ndarray): samples
        weights (np.ndarray): non-negative weights, same length

    Returns:
        float: weighted mean
    """
    return float(np.dot(weights, values) / np.sum(weights))


def remove_weighted_mean(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Return values shifted so that their weighted mean is zero."""
    return values - weighted_mean(values, weights)


def periodic_interp(angles_src: np.ndarray, values_src: np.ndarray, angles_tgt: np.ndarray) -> np.ndarray:
    """Linear interpolation of a 2π-periodic sampled function.

    Args:
        angles_src (np.ndarray): increasing sample angles in [0, 2π)
        values_src (np.ndarray): samples
        angles_tgt (np.ndarray): target angles

    Returns:
        np.ndarray: interpolated values at the target angles
    """
    return np.interp(angles_tgt, angles_src, values_src, period=TWO_PI)


def is_strictly_increasing(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) > 0))


def parse_float_list(text: str) -> List[float]:
    items = [item.strip() for item in text.split(",") if item.strip() != ""]
    return [float(item) for item in items]


def format_float(value: float) -> str:
    """Fixed 17-significant-digit text, exact on round trip."""
    return FLOAT_FORMAT % value


def get_unknown_keys(keys: Iterable[str], allowed: Iterable[str]) -> List[str]:
    """Keys present in ``keys`` but not in ``allowed``, in input order."""
    allowed_set = set(allowed)
    return [key for key in keys if key not in allowed_set]
