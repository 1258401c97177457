"""
Ray tracing of chi_{CE} - chi_E from a point.

Along every ray q + t*theta the integrand f = chi_{CE} - chi_E is
piecewise constant, so the radial integral against t^{-1-s} is exact
once the crossings are known:

    int_rho^inf f(t) t^{-1-s} dt = [f(rho) rho^{-s} + sum_{c > rho} J_c c^{-s}] / s

where J_c is the jump of f at the crossing c. A `RayStructure` stores
the start values and crossings of every ray; it does not depend on s or
on the cutoff, so one trace serves a whole s-scan or rho-schedule.

Crossings are located on a geometric sample grid, merged with one sample
between every two consecutive boundary hits the set reports through
`SetSpec.ray_breaks` (so shells thinner than a grid step are not skipped),
and refined by bisection on the sign of the level function. Beyond the last sample the
membership is extrapolated (the set is treated as a cone from there on).

Antipodal rays q + t*theta and q - t*theta are combined before any
weighting, so sets that map onto their complement under x -> 2q - x
integrate to exactly zero.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union as TUnion

import numpy as np

from src.exceptions import InvalidParameter
from src.geometry.sets import SetSpec
from src.quadrature.directions import DirectionRule

logger = logging.getLogger(__name__)

ArrayLike = TUnion[float, np.ndarray]


@dataclass(frozen=True, eq=False)
class RayStructure:
    rule: DirectionRule
    t_start: np.ndarray       # (2P,)
    t_stop: np.ndarray        # (2P,)
    start_sign: np.ndarray    # (2P,) f just after t_start
    cross_ray: np.ndarray     # (C,) ray index of each crossing
    cross_t: np.ndarray       # (C,)
    cross_jump: np.ndarray    # (C,)
    far_jump: np.ndarray      # (2P,) |f(t_stop) - f(t_stop / 10)|

    @property
    def pairs(self) -> int:
        return self.rule.pairs

    @property
    def ray_weights(self) -> np.ndarray:
        return np.concatenate([self.rule.weights, self.rule.weights])

    def ray_values(self, s: float, rho: Optional[ArrayLike] = None) -> np.ndarray:
        """int_rho^inf f t^{-1-s} dt for every ray (rho defaults to t_start)."""
        nrays = self.t_start.size
        rho = self.t_start if rho is None else np.broadcast_to(np.asarray(rho, dtype=float), (nrays,))
        rho_c = rho[self.cross_ray]
        below = self.cross_t <= rho_c
        f_rho = self.start_sign + np.bincount(self.cross_ray, weights=self.cross_jump * below,
                                              minlength=nrays)
        beyond = np.bincount(self.cross_ray,
                             weights=np.where(below, 0.0, self.cross_jump * self.cross_t ** (-s)),
                             minlength=nrays)
        return (f_rho * rho ** (-s) + beyond) / s

    def pair_values(self, s: float, rho: Optional[ArrayLike] = None) -> np.ndarray:
        """Antipodal sums int_rho^inf [f(theta) + f(-theta)] t^{-1-s} dt per pair.

        Both rays of a pair must share their start radius.
        """
        P = self.pairs
        if rho is None:
            rho = self.t_start[:P]
        rho = np.broadcast_to(np.asarray(rho, dtype=float), (P,))
        cp = self.cross_ray % P
        below = self.cross_t <= rho[cp]
        start = self.start_sign[:P] + self.start_sign[P:]
        f_rho = start + np.bincount(cp, weights=self.cross_jump * below, minlength=P)
        beyond = np.bincount(cp, weights=np.where(below, 0.0, self.cross_jump * self.cross_t ** (-s)),
                             minlength=P)
        return (f_rho * rho ** (-s) + beyond) / s

    def integral(self, s: float, rho: Optional[ArrayLike] = None, paired: bool = True) -> float:
        """Weighted direction sum of the radial integrals."""
        if paired:
            return float(self.rule.weights @ self.pair_values(s, rho))
        return float(self.ray_weights @ self.ray_values(s, rho))

    def far_error(self, s: float) -> float:
        """Change of the extrapolated far field when extrapolating one decade earlier."""
        return float(self.ray_weights @ (self.far_jump * self.t_stop ** (-s))) / s

    def total_weight(self) -> float:
        return self.rule.total_measure()


def _merge_breaks(T: np.ndarray, breaks: np.ndarray, start: np.ndarray, stop: np.ndarray) -> np.ndarray:
    """Add a sample between each pair of consecutive breaks inside (start, stop)."""
    if breaks.shape[1] == 0:
        return T
    inside = (breaks > start[:, None]) & (breaks < stop[:, None])
    b = np.where(inside, breaks, stop[:, None])
    b = np.sort(np.concatenate([start[:, None], b, stop[:, None]], axis=1), axis=1)
    mids = 0.5 * (b[:, 1:] + b[:, :-1])
    return np.sort(np.concatenate([T, mids], axis=1), axis=1)


def trace_rays(E: SetSpec, q, rule: DirectionRule, t_start: ArrayLike, t_stop: ArrayLike,
               samples_per_decade: int = 20, iterations: int = 64,
               chunk: int = 2048) -> RayStructure:
    """Trace both rays of every pair of `rule` from q between t_start and t_stop.

    Args:
        E: The set
        q: Base point
        rule: Direction pairs; rays are ordered (dirs, -dirs)
        t_start: Scalar, per-pair (P,) or per-ray (2P,) start radius (> 0)
        t_stop: Scalar or per-ray end of the sampled range
        samples_per_decade: Geometric sampling density
        iterations: Bisection steps per crossing
        chunk: Rays processed per batch

    Returns:
        The RayStructure
    """
    q = np.asarray(q, dtype=float)
    P = rule.pairs
    nrays = 2 * P
    dirs = np.concatenate([rule.dirs, -rule.dirs], axis=0)
    start = np.asarray(t_start, dtype=float)
    if start.ndim == 1 and start.size == P:
        start = np.concatenate([start, start])
    start = np.broadcast_to(start, (nrays,)).astype(float)
    stop = np.broadcast_to(np.asarray(t_stop, dtype=float), (nrays,)).astype(float)
    if np.any(start <= 0) or np.any(stop <= start):
        raise InvalidParameter("t_start", float(np.min(start)), "need 0 < t_start < t_stop")

    decades = float(np.max(np.log10(stop / start)))
    K = max(int(np.ceil(decades * samples_per_decade)) + 1, 2)
    back = min(samples_per_decade, K - 1)
    grid = np.linspace(0.0, 1.0, K)

    start_sign = np.empty(nrays)
    far_jump = np.empty(nrays)
    c_ray, c_t, c_jump = [], [], []
    n = q.size

    for lo_idx in range(0, nrays, chunk):
        idx = np.arange(lo_idx, min(lo_idx + chunk, nrays))
        geometric = start[idx, None] * (stop[idx] / start[idx])[:, None] ** grid[None, :]
        D = dirs[idx]
        T = _merge_breaks(geometric, E.ray_breaks(q, D), start[idx], stop[idx])
        X = q + T[..., None] * D[:, None, :]
        F = np.sign(E.level(X.reshape(-1, n))).reshape(T.shape)
        start_sign[idx] = F[:, 0]
        one_decade_in = np.sign(E.level(q + geometric[:, -1 - back, None] * D))
        far_jump[idx] = np.abs(F[:, -1] - one_decade_in)

        r_loc, k_loc = np.nonzero(F[:, 1:] != F[:, :-1])
        if r_loc.size == 0:
            continue
        lo = T[r_loc, k_loc]
        hi = T[r_loc, k_loc + 1]
        f_lo = F[r_loc, k_loc]
        Dc = D[r_loc]
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            fm = np.sign(E.level(q + mid[:, None] * Dc))
            same = fm == f_lo
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        c_ray.append(idx[r_loc])
        c_t.append(0.5 * (lo + hi))
        c_jump.append(F[r_loc, k_loc + 1] - f_lo)

    if c_ray:
        cross_ray = np.concatenate(c_ray)
        cross_t = np.concatenate(c_t)
        cross_jump = np.concatenate(c_jump).astype(float)
    else:
        cross_ray = np.zeros(0, dtype=np.int64)
        cross_t = np.zeros(0)
        cross_jump = np.zeros(0)

    logger.debug(f"Traced {nrays} rays x {K}+ samples: {cross_t.size} crossings")
    return RayStructure(rule, start, stop, start_sign, cross_ray, cross_t, cross_jump, far_jump)
