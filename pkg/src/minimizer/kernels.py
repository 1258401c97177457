"""
Cell-pair interaction weights and per-cell exterior tails.

The weight of two cubic cells of side h at integer offset o is

    K(o) = int_{cell} int_{cell + o h} |x - y|^{-n-s} dy dx
         = h^{n-s} int_{[-1,1]^n} prod_i (1 - |z_i|) |o + z|^{-n-s} dz.

Offsets with |o|_inf <= near_radius are integrated exactly (closed form
in n = 1, adaptive quadrature on the four tent quadrants in n = 2, which
puts the kernel singularity at a panel corner); farther offsets use the
midpoint value h^{n-s} |o|^{-n-s}.

Tails are the interactions of a cell with E0 (and with C E0) outside the
rasterized box, traced along rays from the cell center. The ray traces
do not depend on s.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np
from scipy import integrate

from src.exceptions import InvalidParameter
from src.geometry.sets import SetSpec
from src.quadrature.directions import uniform_rule
from src.quadrature.rays import RayStructure, trace_rays

logger = logging.getLogger(__name__)


def _interval_pair(k: np.ndarray, s: float) -> np.ndarray:
    """Exact interaction of [0, 1] and [k, k + 1], k >= 1."""
    p = 1.0 - s
    return (2.0 * k ** p - (k - 1.0) ** p - (k + 1.0) ** p) / (s * p)


def _square_pair(o: Tuple[int, int], s: float) -> float:
    e = 2.0 + s

    def f(z2, z1):
        w1, w2 = o[0] + z1, o[1] + z2
        return (1.0 - abs(z1)) * (1.0 - abs(z2)) * (w1 * w1 + w2 * w2) ** (-0.5 * e)

    total = 0.0
    for a1, b1 in ((-1.0, 0.0), (0.0, 1.0)):
        for a2, b2 in ((-1.0, 0.0), (0.0, 1.0)):
            value, _ = integrate.dblquad(f, a1, b1, a2, b2, epsabs=1e-12, epsrel=1e-10)
            total += value
    return total


@lru_cache(maxsize=64)
def near_weights(n: int, s: float, near_radius: int) -> Tuple[Tuple[Tuple[int, ...], float], ...]:
    """Exact unit-cell weights for 0 < |o|_inf <= near_radius with o sorted descending, o >= 0."""
    if n == 1:
        k = np.arange(1, near_radius + 1, dtype=float)
        return tuple(((int(o),), float(v)) for o, v in zip(k, _interval_pair(k, s)))
    if n == 2:
        out = []
        for a in range(1, near_radius + 1):
            for b in range(0, a + 1):
                out.append(((a, b), _square_pair((a, b), s)))
        logger.debug(f"Near kernel for s={s}: {len(out)} exact offsets")
        return tuple(out)
    raise InvalidParameter("n", n, "grid kernels exist for n = 1 and n = 2")


def kernel_table(n: int, s: float, extent: Sequence[int], h: float, near_radius: int = 3) -> np.ndarray:
    """Weights K(o) on the full offset box |o_i| <= extent_i - 1, centered; K(0) = 0."""
    if not 0.0 < s < 1.0:
        raise InvalidParameter("s", s, "must lie in (0, 1)")
    axes = [np.arange(-(m - 1), m) for m in extent]
    O = np.meshgrid(*axes, indexing="ij")
    dist = np.sqrt(sum(o.astype(float) ** 2 for o in O))
    with np.errstate(divide="ignore"):
        K = np.where(dist > 0, dist ** (-n - s), 0.0)

    cheb = np.max(np.abs(np.stack(O)), axis=0)
    near = dict(near_weights(n, s, near_radius))
    if n == 1:
        idx = np.nonzero((cheb > 0) & (cheb <= near_radius))[0]
        K[idx] = [near[(abs(int(O[0][i])),)] for i in idx]
    else:
        for i, j in zip(*np.nonzero((cheb > 0) & (cheb <= near_radius))):
            a, b = sorted((abs(int(O[0][i, j])), abs(int(O[1][i, j]))), reverse=True)
            K[i, j] = near[(a, b)]
    return K * h ** (n - s)


def box_exit(points: np.ndarray, dirs: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Distance from each point along each direction to the boundary of the box [lo, hi]; (m, R)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        up = (hi[None, None, :] - points[:, None, :]) / dirs[None, :, :]
        down = (lo[None, None, :] - points[:, None, :]) / dirs[None, :, :]
    step = np.where(dirs[None, :, :] > 0, up, np.where(dirs[None, :, :] < 0, down, np.inf))
    return np.min(step, axis=-1)


def tail_structures(E0: SetSpec, centers: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                    cfg, workers: int = 1) -> List[RayStructure]:
    """Rays from every cell center, starting where they leave the box [lo, hi]."""
    gc = cfg.grid
    qc = cfg.quadrature
    n = centers.shape[1]
    rule = uniform_rule(n, panels=max(1, gc.tail_directions // 8), order=8,
                        polar_panels=max(1, gc.tail_directions // 8), polar_order=4,
                        azimuth_nodes=gc.tail_directions)
    dirs = np.concatenate([rule.dirs, -rule.dirs], axis=0)
    exits = box_exit(centers, dirs, lo, hi)
    factor = 10.0 ** gc.tail_decades

    def trace(i: int) -> RayStructure:
        return trace_rays(E0, centers[i], rule, exits[i], exits[i] * factor,
                          samples_per_decade=gc.tail_samples_per_decade,
                          iterations=qc.crossing_iterations, chunk=qc.chunk_rays)

    if workers <= 1:
        return [trace(i) for i in range(centers.shape[0])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(trace, range(centers.shape[0])))


def tail_values(structures: Sequence[RayStructure], s: float, h: float) -> Tuple[np.ndarray, np.ndarray]:
    """(T+, T-): cell interactions with E0 and with C E0 beyond the box."""
    plus = np.empty(len(structures))
    minus = np.empty(len(structures))
    for i, rays in enumerate(structures):
        w = rays.ray_weights
        whole = rays.t_start ** (-s) / s
        signed = rays.ray_values(s)
        plus[i] = 0.5 * (w @ (whole - signed))
        minus[i] = 0.5 * (w @ (whole + signed))
    if structures:
        n = structures[0].rule.dim
        plus *= h ** n
        minus *= h ** n
    return plus, minus
