"""
Local graph charts of arbitrary sets.

At a boundary point p with outward normal nu the set is rotated so that
-nu becomes e_n; along each vertical line of the cylinder the boundary
height u(x') is found by bisection on the level function. The resulting
GraphFunction feeds the graph formula, so every SetSpec with a regular
boundary point gets the same treatment as an explicit supergraph.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.config.settings import get_config
from src.curvature.graph_formula import CurvatureResult, curvature_graph
from src.exceptions import FormulaNotApplicable, GraphLeavesCylinder, InvalidParameter
from src.geometry.graphs import GraphFunction, GrowthTag
from src.geometry.sets import Ball, Complement, Rotate, SetSpec, Supergraph, Translate
from src.quadrature.directions import tangent_frame
from src.quadrature.pv import pv_curvature_integral

logger = logging.getLogger(__name__)

BISECTION_STEPS = 80


@dataclass(frozen=True, eq=False)
class Chart:
    point: np.ndarray        # p in global coordinates
    frame: np.ndarray        # columns: tangent basis, then -nu
    graph: GraphFunction     # u over the local base space
    local_set: SetSpec       # E in local coordinates, p at the origin
    r: float
    h: float

    def to_global(self, y_local) -> np.ndarray:
        return self.point + np.asarray(y_local, dtype=float) @ self.frame.T

    def boundary_point(self, base) -> np.ndarray:
        """Global point of the boundary above the local base point."""
        base = np.atleast_1d(np.asarray(base, dtype=float))
        return self.to_global(np.append(base, float(self.graph.eval(base))))


def _height_function(E_local: SetSpec, h: float):
    def heights(Y):
        Y = np.asarray(Y, dtype=float)
        shape = Y.shape[:-1]
        flat = Y.reshape(-1, Y.shape[-1])
        lo = np.full(flat.shape[0], -h)
        hi = np.full(flat.shape[0], h)
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            inside = E_local.level(np.column_stack([flat, mid])) < 0.0
            hi = np.where(inside, mid, hi)
            lo = np.where(inside, lo, mid)
        out = (0.5 * (lo + hi)).reshape(shape)
        return float(out) if out.ndim == 0 else out
    return heights


def _fd_gradient(fn, dim: int, step: float):
    def grad(Y):
        Y = np.asarray(Y, dtype=float)
        out = np.empty(Y.shape)
        for i in range(dim):
            e = np.zeros(dim)
            e[i] = step
            out[..., i] = (np.asarray(fn(Y + e)) - np.asarray(fn(Y - e))) / (2.0 * step)
        return out
    return grad


def _single_crossing(E_local: SetSpec, dim: int, r: float, h: float, lines: int = 9) -> bool:
    """Every sampled vertical line through B'_{2r} x (-2h, 2h) switches membership once."""
    if dim == 1:
        base = np.linspace(-2.0 * r, 2.0 * r, lines)[:, None]
    else:
        g = np.linspace(-2.0 * r, 2.0 * r, lines)
        X, Y = np.meshgrid(g, g, indexing="ij")
        base = np.column_stack([X.ravel(), Y.ravel()])
        base = base[np.linalg.norm(base, axis=1) <= 2.0 * r]
    t = np.linspace(-2.0 * h, 2.0 * h, 81)
    pts = np.concatenate([np.repeat(base, t.size, axis=0), np.tile(t, base.shape[0])[:, None]], axis=1)
    inside = (E_local.level(pts) < 0.0).reshape(base.shape[0], t.size)
    switches = np.sum(inside[:, 1:] != inside[:, :-1], axis=1)
    return bool(np.all(switches == 1) and np.all(inside[:, -1]) and not np.any(inside[:, 0]))


def local_chart(E: SetSpec, p, cfg=None, r: Optional[float] = None, h: Optional[float] = None) -> Chart:
    """Graph chart of E around the boundary point p.

    Raises:
        InvalidParameter: If the level function has no usable normal at p
        GraphLeavesCylinder: If no cylinder up to max_shrinks halvings is a graph cylinder
    """
    full = get_config() if cfg is None else cfg
    cc = full.curvature
    p = np.asarray(p, dtype=float)
    n = E.dim
    if n < 2:
        raise InvalidParameter("n", n, "charts need n >= 2")
    nu = E.normal(p)
    frame = tangent_frame(-nu)
    E_local = Rotate(Translate(E, -p), frame.T)

    r = cc.chart_radius if r is None else float(r)
    h = (cc.chart_height if cc.chart_height is not None else r) if h is None else float(h)
    for _ in range(cc.max_shrinks + 1):
        if _single_crossing(E_local, n - 1, r, h):
            break
        logger.info(f"Chart at {p.tolist()} is not a graph on Q(r={r:g}, h={h:g}); shrinking")
        r *= 0.5
        h *= 0.5
    else:
        raise GraphLeavesCylinder(r, h)

    heights = _height_function(E_local, 2.0 * h)
    step = cc.hessian_step * r
    graph = GraphFunction(
        dim=n - 1,
        eval_fn=heights,
        grad_fn=_fd_gradient(heights, n - 1, step),
        holder_exponent=1.0,
        c1alpha_norm=float("inf"),
        norm_center=tuple(np.zeros(n - 1)),
        norm_radius=r,
        growth_tag=GrowthTag("custom"),
        family="chart",
    )
    return Chart(p, frame, graph, E_local, r, h)


def _pv_result(E: SetSpec, p, s: float, cfg) -> CurvatureResult:
    res = pv_curvature_integral(E, p, s, cfg)
    return CurvatureResult.build(s, res.value - res.tail_part, res.tail_part, res.error_estimate,
                                 r=res.tail_radius, h=res.tail_radius, method="pv",
                                 converged=res.converged)


def curvature_at(E: SetSpec, p, s: float, cfg=None, method: str = "auto",
                 chart: Optional[Chart] = None) -> CurvatureResult:
    """I_s[E](p) by the graph formula when a chart exists, by the principal value otherwise.

    Args:
        E: The set
        p: Boundary point
        s: Fractional order in (0, 1)
        cfg: Full configuration
        method: "auto", "graph" or "pv"
        chart: Prebuilt chart to reuse across s

    Returns:
        CurvatureResult (method records which evaluator ran)
    """
    full = get_config() if cfg is None else cfg
    p = np.asarray(p, dtype=float)
    if method not in ("auto", "graph", "pv"):
        raise InvalidParameter("method", method, "must be auto, graph or pv")
    if method == "pv" or E.dim == 1:
        return _pv_result(E, p, s, full)
    try:
        if chart is None and isinstance(E, Supergraph) and E.axis == E.dim - 1:
            return curvature_graph(E.graph, p, E, None, None, s, full)
        chart = chart or local_chart(E, p, full)
        origin = np.zeros(E.dim)
        return curvature_graph(chart.graph, origin, chart.local_set, chart.r, chart.h, s, full)
    except (FormulaNotApplicable, GraphLeavesCylinder, InvalidParameter) as e:
        if method == "graph":
            raise
        logger.info(f"Graph formula unavailable at {p.tolist()} ({e.message}); using the principal value")
        return _pv_result(E, p, s, full)


def classical_curvature(E: SetSpec, p, cfg=None) -> float:
    """Average of the principal curvatures at p, positive for convex E."""
    p = np.asarray(p, dtype=float)
    if isinstance(E, Ball):
        return 1.0 / E.radius
    if isinstance(E, Complement) and isinstance(E.inner, Ball):
        return -1.0 / E.inner.radius
    full = get_config() if cfg is None else cfg
    if isinstance(E, Supergraph) and E.axis == E.dim - 1:
        u, base = E.graph, p[:-1]
        step = full.curvature.hessian_step
    else:
        chart = local_chart(E, p, full)
        u, base = chart.graph, np.zeros(E.dim - 1)
        step = full.curvature.hessian_step * chart.r
    g = np.atleast_1d(u.grad(base))
    H = u.hessian(base, step=step)
    # mean curvature of a graph, reduced to trace(D^2 u) when grad u = 0
    q = float(np.sqrt(1.0 + g @ g))
    shape = (np.eye(g.size) - np.outer(g, g) / q ** 2) @ H / q
    return float(np.trace(shape)) / g.size
