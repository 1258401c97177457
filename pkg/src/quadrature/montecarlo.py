"""
Independent oracles for the curvature integrals.

`mc_truncated_curvature` is a seeded Monte-Carlo estimate of I_s^rho
built from antipodal direction pairs and radii drawn with density
proportional to t^{-1-s}; the part beyond the sampling shell comes from
the tail module. The closed forms below give the principal value at
boundary points of the unit disc and of the quadrant edge.
"""

import logging
from typing import NamedTuple, Optional

import numpy as np
from scipy import special

from src.config.settings import get_config
from src.exceptions import InvalidParameter
from src.geometry.sets import SetSpec, sphere_measure
from src.quadrature.tail import tail_estimate

logger = logging.getLogger(__name__)


class MonteCarloEstimate(NamedTuple):
    value: float
    std_error: float
    samples: int
    seed: int


def mc_truncated_curvature(E: SetSpec, q, s: float, rho: float, R: Optional[float] = None,
                           samples: Optional[int] = None, seed: Optional[int] = None,
                           cfg=None) -> MonteCarloEstimate:
    """Monte-Carlo I_s^rho[E](q) on the shell rho < |y - q| < R plus the tail beyond R."""
    if not 0.0 < s < 1.0:
        raise InvalidParameter("s", s, "must lie in (0, 1)")
    if rho <= 0:
        raise InvalidParameter("rho", rho, "must be positive")
    full = get_config() if cfg is None else cfg
    samples = full.quadrature.mc_samples if samples is None else int(samples)
    seed = full.quadrature.mc_seed if seed is None else int(seed)
    q = np.asarray(q, dtype=float)
    n = E.dim
    if R is None:
        b = E.bounding_radius()
        R = 10.0 * max(1.0, rho) if b is None else max(10.0 * rho, b + float(np.linalg.norm(q)) + 1.0)
    if R <= rho:
        raise InvalidParameter("R", R, "must exceed rho")

    rng = np.random.default_rng(seed)
    half = max(samples // 2, 1)
    theta = rng.standard_normal((half, n))
    theta /= np.linalg.norm(theta, axis=1, keepdims=True)
    top, bottom = rho ** (-s), R ** (-s)
    u = rng.random(half)
    t = (top - u * (top - bottom)) ** (-1.0 / s)

    offsets = t[:, None] * theta
    pair = 0.5 * (np.sign(E.level(q + offsets)) + np.sign(E.level(q - offsets)))
    mass = sphere_measure(n) * (top - bottom) / s
    shell = mass * float(np.mean(pair))
    shell_err = mass * float(np.std(pair)) / np.sqrt(half)

    tail = tail_estimate(E, q, R, s, signed=True, cfg=full)
    logger.debug(f"Monte-Carlo shell={shell:.6g}+-{shell_err:.2g} tail={tail.value:.6g} ({tail.method})")
    return MonteCarloEstimate(shell + tail.value, shell_err + tail.error, 2 * half, seed)


def disk_boundary_curvature(s: float, radius: float = 1.0) -> float:
    """I_s of the disc of given radius at a boundary point.

    2^{1-s} sqrt(pi) Gamma((1-s)/2) / (s Gamma(1 - s/2)) radius^{-s}
    """
    if not 0.0 < s < 1.0:
        raise InvalidParameter("s", s, "must lie in (0, 1)")
    value = 2.0 ** (1.0 - s) * np.sqrt(np.pi) * special.gamma(0.5 * (1.0 - s))
    value /= s * special.gamma(1.0 - 0.5 * s)
    return float(value * radius ** (-s))


def quadrant_edge_curvature(s: float, distance: float = 1.0) -> float:
    """I_s of the first quadrant at the edge point (distance, 0).

    sqrt(pi) Gamma((1+s)/2) / (s Gamma(1 + s/2)) distance^{-s}
    """
    if not 0.0 < s < 1.0:
        raise InvalidParameter("s", s, "must lie in (0, 1)")
    if distance <= 0:
        raise InvalidParameter("distance", distance, "must be positive")
    value = np.sqrt(np.pi) * special.gamma(0.5 * (1.0 + s)) / (s * special.gamma(1.0 + 0.5 * s))
    return float(value * distance ** (-s))
