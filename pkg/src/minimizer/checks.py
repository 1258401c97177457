"""
Checkers for the classification of minimizers: delta-density, the density
estimate, the maximum principle and the Euler-Lagrange residual report.
"""

import logging
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from src.config.settings import get_config
from src.exceptions import HypothesisViolated, InvalidParameter, ResolutionTooCoarse
from src.geometry.domain import Domain, signed_distance
from src.geometry.sets import SetSpec, sphere_measure
from src.minimizer.grid import GridProblem, build_layout, problem_from_layout
from src.minimizer.solvers import MinimizeResult, minimize
from src.models import CheckReport
from src.quadrature.pv import pv_curvature_integral

logger = logging.getLogger(__name__)

CENTER_CHUNK = 256


class DenseResult(NamedTuple):
    dense: bool
    witness: Optional[Tuple[float, ...]]
    centers_checked: int


def _lattice(lo: np.ndarray, hi: np.ndarray, pitch: float) -> np.ndarray:
    axes = [np.arange(a + 0.5 * pitch, b, pitch) for a, b in zip(lo, hi)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, lo.size)


def _ball_offsets(delta: float, pitch: float, n: int) -> np.ndarray:
    k = int(np.ceil(delta / pitch))
    axes = [np.arange(-k, k + 1) * pitch] * n
    D = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    return D[np.linalg.norm(D, axis=1) < delta]


def is_delta_dense(E, omega: Domain, delta: float, problem: Optional[GridProblem] = None,
                   pitch: Optional[float] = None) -> DenseResult:
    """|B_delta(x) cap E| > 0 for every x with B_delta(x) compactly inside Omega.

    Args:
        E: A SetSpec, or a state on the Omega cells of `problem`
        omega: The domain
        delta: Ball radius
        problem: Required when E is a raster state
        pitch: Sampling pitch inside the balls (default delta/8, at most half a cell)

    Returns:
        DenseResult; witness is the center of an empty ball when not dense

    Raises:
        ResolutionTooCoarse: If E is a raster state and delta <= h
    """
    if delta <= 0:
        raise InvalidParameter("delta", delta, "must be positive")
    if isinstance(E, SetSpec):
        target = E
        step = delta / 8.0 if pitch is None else float(pitch)
    else:
        if problem is None:
            raise InvalidParameter("problem", None, "raster states need their problem")
        if delta <= problem.h:
            raise ResolutionTooCoarse(delta, problem.h)
        target = problem.as_set(E)
        step = min(delta / 8.0, 0.5 * problem.h) if pitch is None else float(pitch)

    lo, hi = omega.bounding_box()
    centers = _lattice(lo, hi, delta / 4.0)
    centers = centers[np.asarray(signed_distance(omega, centers)) < -delta]
    offsets = _ball_offsets(delta, step, omega.n)
    for start in range(0, centers.shape[0], CENTER_CHUNK):
        block = centers[start:start + CENTER_CHUNK]
        pts = block[:, None, :] + offsets[None, :, :]
        hit = np.any(target.level(pts.reshape(-1, omega.n)).reshape(block.shape[0], -1) < 0.0, axis=1)
        if not np.all(hit):
            witness = tuple(float(c) for c in block[int(np.argmin(hit))])
            logger.debug(f"B_{delta:g}({witness}) misses the set")
            return DenseResult(False, witness, start + int(np.argmin(hit)) + 1)
    return DenseResult(True, None, centers.shape[0])


def density_estimate_check(result: MinimizeResult, problem: GridProblem, alpha_bar: float,
                           delta: float, gamma: float) -> CheckReport:
    """|(Omega cap B_delta(x)) minus E| >= gamma (w - 2a)/(w - a) |Omega cap B_delta(x)| at every cell center.

    The right-hand side is measured on B_{delta - h}(x), one cell layer of slack.
    """
    if not 0.0 < gamma < 1.0:
        raise InvalidParameter("gamma", gamma, "must lie in (0, 1)")
    n = problem.layout.dim
    w = sphere_measure(n)
    if not 0.0 <= alpha_bar < w:
        raise InvalidParameter("alpha_bar", alpha_bar, f"must lie in [0, {w:.6g})")
    factor = max(gamma * (w - 2.0 * alpha_bar) / (w - alpha_bar), 0.0)
    centers = problem.layout.centers()
    empty = ~np.asarray(result.state, dtype=bool)
    tree = cKDTree(centers)
    outer = tree.query_ball_point(centers, r=delta)
    inner = tree.query_ball_point(centers, r=max(delta - problem.h, 0.0))

    worst_ratio, worst_center, failures = 1.0, None, 0
    for k in range(centers.shape[0]):
        total = len(outer[k])
        free = int(np.sum(empty[outer[k]]))
        ratio = free / total if total else 1.0
        if ratio < worst_ratio:
            worst_ratio, worst_center = ratio, centers[k].tolist()
        if free < factor * len(inner[k]):
            failures += 1
    passed = failures == 0
    return CheckReport("density_estimate", passed, max(factor - worst_ratio, 0.0), {
        "bound_factor": factor, "worst_ratio": worst_ratio, "worst_center": worst_center,
        "failing_centers": failures, "delta": delta, "gamma": gamma, "alpha_bar": alpha_bar,
    }).log()


def maximum_principle_check(result: MinimizeResult, problem: GridProblem, nu, a: float,
                            samples: int = 4000, seed: int = 0) -> CheckReport:
    """{x.nu <= a} minus Omega outside E0 forces no occupied cell with x.nu <= a - h.

    Raises:
        HypothesisViolated: If the exterior data meets {x.nu <= a} outside Omega
    """
    nu = np.asarray(nu, dtype=float)
    nu = nu / np.linalg.norm(nu)
    layout = problem.layout
    X = layout.grid_centers()
    below = (X @ nu) <= a
    if np.any(layout.exterior_occ & below):
        raise HypothesisViolated(f"collar cells of E0 lie in {{x.nu <= {a}}}")

    rng = np.random.default_rng(seed)
    lo, hi = layout.box()
    mid, span = 0.5 * (lo + hi), 10.0 * (hi - lo)
    Y = rng.uniform(mid - span, mid + span, size=(samples, layout.dim))
    Y = Y[((Y @ nu) < a) & (np.asarray(signed_distance(layout.omega, Y)) > 0)]
    if Y.size and np.any(layout.exterior.indicator(Y)):
        raise HypothesisViolated(f"E0 meets {{x.nu <= {a}}} outside the domain")

    heights = layout.centers() @ nu
    occupied = np.asarray(result.state, dtype=bool)
    excess = (a - problem.h) - heights[occupied]
    offenders = int(np.sum(excess >= 0.0))
    return CheckReport("maximum_principle", offenders == 0, float(max(np.max(excess, initial=0.0), 0.0)), {
        "nu": nu.tolist(), "a": a, "offending_cells": offenders, "h": problem.h,
    }).log()


def _interface_points(problem: GridProblem, state: np.ndarray, limit: int):
    layout = problem.layout
    occ = problem.to_grid(state)
    lookup = {tuple(c): k for k, c in enumerate(layout.cells)}
    points = []
    for k, c in enumerate(layout.cells):
        for axis in range(layout.dim):
            nb = c.copy()
            nb[axis] += 1
            j = lookup.get(tuple(nb))
            if j is None or bool(state[k]) == bool(state[j]):
                continue
            mid = layout.origin + (c + 0.5) * layout.h
            mid[axis] += 0.5 * layout.h
            if signed_distance(layout.omega, mid) >= -layout.h:
                continue
            normal = np.zeros(layout.dim)
            normal[axis] = 1.0 if occ[tuple(c)] else -1.0
            points.append((mid, normal))
            if len(points) >= limit:
                return points
    return points


def euler_lagrange_report(omega: Domain, E0: SetSpec, s: float, resolutions: Sequence[int],
                          cfg=None, max_points: int = 8) -> CheckReport:
    """|I_s| at interface midpoints of minimizers away from the domain boundary, per resolution.

    The fitted order of the median residual in h is reported, not asserted.
    """
    full = get_config() if cfg is None else cfg
    rows = []
    for res in resolutions:
        layout = build_layout(omega, E0, full, resolution=res)
        problem = problem_from_layout(layout, s, full)
        result = minimize(problem, full)
        E = problem.as_set(result.state)
        values = []
        for mid, normal in _interface_points(problem, result.state, max_points):
            pv = pv_curvature_integral(E, mid, s, full, r_local=layout.h, on_boundary=False, normal=normal)
            values.append(abs(pv.value))
        residual = float(np.median(values)) if values else 0.0
        rows.append({"resolution": res, "h": layout.h, "points": len(values), "median_residual": residual})
        logger.info(f"Euler-Lagrange residual at h={layout.h:.4g}: {residual:.4g} over {len(values)} points")

    usable = [r for r in rows if r["median_residual"] > 0.0]
    order = None
    if len(usable) >= 2:
        order = float(np.polyfit(np.log([r["h"] for r in usable]),
                                 np.log([r["median_residual"] for r in usable]), 1)[0])
    finite = all(np.isfinite(r["median_residual"]) for r in rows)
    return CheckReport("euler_lagrange_residual", finite, 0.0, {"rows": rows, "fitted_order": order, "s": s}).log()
