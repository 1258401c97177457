"""
Extrapolation of scaled values to s -> 0 and to s -> 1.
"""

import logging
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import InvalidParameter

logger = logging.getLogger(__name__)


class Extrapolation(NamedTuple):
    limit: float
    error_bar: float
    extrapolants: Tuple[float, ...]
    oscillating: bool
    split: Optional[Tuple[float, float]]


def richardson_linear(x_coarse: float, v_coarse: float, x_fine: float, v_fine: float) -> float:
    """Value at x = 0 of the line through (x_coarse, v_coarse) and (x_fine, v_fine)."""
    if x_coarse == x_fine:
        raise InvalidParameter("x", x_fine, "extrapolation nodes must differ")
    return (x_coarse * v_fine - x_fine * v_coarse) / (x_coarse - x_fine)


def detect_oscillation(values: Sequence[float], tol: float) -> bool:
    """True when successive differences change sign at least twice with amplitude above tol."""
    d = np.diff(np.asarray(values, dtype=float))
    big = d[np.abs(d) > tol]
    if big.size < 3:
        return False
    return int(np.sum(np.sign(big[1:]) != np.sign(big[:-1]))) >= 2


def extrapolate_to_zero(grid: Sequence[float], values: Sequence[float],
                        oscillation_tol: float = 0.0) -> Extrapolation:
    """Limit of values as the grid variable tends to 0, model L + c x.

    Args:
        grid: Strictly decreasing positive nodes
        values: Values at the nodes
        oscillation_tol: Amplitude below which wiggles are ignored

    Returns:
        Extrapolation with the last extrapolant as limit and the difference
        of the last two as error bar; oscillating sequences report the
        (limsup, liminf) of their finer half instead
    """
    x = np.asarray(grid, dtype=float)
    v = np.asarray(values, dtype=float)
    if x.size != v.size or x.size < 2:
        raise InvalidParameter("grid", x.size, "need at least two nodes with matching values")
    if np.any(np.diff(x) >= 0) or np.any(x <= 0):
        raise InvalidParameter("grid", x.tolist(), "nodes must be positive and strictly decreasing")

    ext = tuple(richardson_linear(x[k], v[k], x[k + 1], v[k + 1]) for k in range(x.size - 1))
    if detect_oscillation(v, oscillation_tol):
        tail = v[v.size // 2:]
        hi, lo = float(np.max(tail)), float(np.min(tail))
        logger.warning(f"Scaled values oscillate: limsup ~ {hi:.6g}, liminf ~ {lo:.6g}")
        return Extrapolation(0.5 * (hi + lo), 0.5 * (hi - lo), ext, True, (hi, lo))

    limit = ext[-1]
    error = abs(ext[-1] - ext[-2]) if len(ext) >= 2 else abs(v[-1] - v[-2])
    return Extrapolation(float(limit), float(error), ext, False, None)


def extrapolate_to_one(s_values: Sequence[float], values: Sequence[float], points: int = 3) -> Tuple[float, float]:
    """Value at s = 1 of a least-squares line in (1 - s) through the last `points` samples.

    Returns:
        (limit, residual spread) where the spread is the change when one
        fewer point is used
    """
    s = np.asarray(s_values, dtype=float)
    v = np.asarray(values, dtype=float)
    if s.size < 2:
        raise InvalidParameter("s_values", s.size, "need at least two samples")
    k = min(points, s.size)
    order = np.argsort(s)
    s, v = s[order][-k:], v[order][-k:]
    limit = float(np.polyval(np.polyfit(1.0 - s, v, 1), 0.0))
    if k > 2:
        fewer = float(np.polyval(np.polyfit(1.0 - s[1:], v[1:], 1), 0.0))
        return limit, abs(limit - fewer)
    return limit, 0.0
