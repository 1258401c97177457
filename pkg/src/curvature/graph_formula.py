"""
Fractional mean curvature at a graph point.

Near p the set is the supergraph of u over B'_r(p'). With y' = p' + rho w,
w in S^{n-2}, the curvature splits into an absolutely convergent local
part and a tail over the complement of the cylinder
Q_{r,h}(p) = B'_r(p') x (p_n - h, p_n + h):

    local = 2 int_{S^{n-2}} int_0^r [G_s(D(rho, w)) - G_s(grad u(p') . w)] rho^{-1-s} drho dw
    D(rho, w) = (u(p' + rho w) - u(p')) / rho

    tail  = int_{R^n \\ Q_{r,h}(p)} (chi_{CE} - chi_E)(y) |y - p|^{-n-s} dy

For C^2 graphs the leading term a(w) rho with a(w) = g_s(grad u . w) w^T D^2u w / 2
is integrated exactly, which keeps (1 - s) I_s accurate as s -> 1. The tail
is a ray integral starting at the cylinder exit of every direction pair.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.config.settings import get_config
from src.exceptions import FormulaNotApplicable, GraphLeavesCylinder, InvalidParameter
from src.geometry.graphs import GraphFunction
from src.geometry.sets import SetSpec, Supergraph
from src.quadrature.directions import DirectionRule, gauss_on, graded_breaks, uniform_rule
from src.quadrature.kernels import G_kernel, g_kernel
from src.quadrature.rays import trace_rays

logger = logging.getLogger(__name__)

INNER_CUTOFF = 1e-10


@dataclass
class CurvatureResult:
    s: float
    value: float
    scaled_s0: float
    scaled_s1: float
    scaled_both: float
    local_part: float
    tail_part: float
    error_estimate: float
    r: float = 0.0
    h: float = 0.0
    method: str = "graph"
    converged: bool = True
    bound_ratio: Optional[float] = None

    @classmethod
    def build(cls, s: float, local: float, tail: float, error: float, **extra) -> "CurvatureResult":
        value = local + tail
        return cls(s, value, s * value, (1.0 - s) * value, s * (1.0 - s) * value,
                   local, tail, abs(error), **extra)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _sphere_nodes(dim: int, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Directions w in S^{dim-1} of the base space with weights."""
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.ones(2)
    if dim == 2:
        phi = 2.0 * np.pi * np.arange(nodes) / nodes
        return np.column_stack([np.cos(phi), np.sin(phi)]), np.full(nodes, 2.0 * np.pi / nodes)
    raise InvalidParameter("n", dim + 1, "the graph formula is implemented for n = 2 and n = 3")


def _base_samples(dim: int, center: np.ndarray, r: float, count: int, nodes: int) -> np.ndarray:
    if dim == 1:
        return center + np.linspace(-r, r, count)[:, None]
    radii = np.linspace(0.0, r, count)
    w, _ = _sphere_nodes(dim, nodes)
    return (center + radii[:, None, None] * w[None, :, :]).reshape(-1, dim)


def graph_deviation(u: GraphFunction, p: np.ndarray, r: float, cfg=None) -> float:
    """max |u(y') - p_n| over sampled y' in B'_r(p')."""
    cc = (get_config() if cfg is None else cfg).curvature
    Y = _base_samples(u.dim, p[:-1], r, cc.check_samples, min(cc.angular_nodes, 32))
    return float(np.max(np.abs(u.eval(Y) - p[-1])))


def _local_part(u: GraphFunction, p: np.ndarray, r: float, s: float, order: int,
                use_hessian: bool, cfg) -> Tuple[float, float]:
    """(local part, truncation estimate) with Gauss panels of the given order."""
    cc = cfg.curvature
    n = u.dim + 1
    if u.dim == 0:
        return 0.0, 0.0
    p_base, p_n = p[:-1], p[-1]
    w, wts = _sphere_nodes(u.dim, cc.angular_nodes)
    b = w @ np.atleast_1d(u.grad(p_base))

    lower = cc.remainder_cutoff if use_hessian else INNER_CUTOFF
    grading = cfg.quadrature.radial_grading
    # annuli r 2^{-grading k} down to r * lower
    levels = int(np.ceil(np.log2(1.0 / lower) / grading))
    rho, rw = gauss_on(r * graded_breaks(0.0, 1.0, levels, 2.0 ** (-grading))[1:], order)

    Y = p_base + rho[:, None, None] * w[None, :, :]
    D = (u.eval(Y) - p_n) / rho[:, None]
    diff = G_kernel(n, s, D) - G_kernel(n, s, b)[None, :]

    exact = 0.0
    if use_hessian:
        H = u.hessian(p_base, step=cc.hessian_step * r)
        kappa = np.einsum("ai,ij,aj->a", w, H, w)
        a = g_kernel(n, s, b) * 0.5 * kappa
        diff = diff - rho[:, None] * a[None, :]
        exact = 2.0 * float(wts @ a) * r ** (1.0 - s) / (1.0 - s)

    radial = np.sum(diff * wts[None, :], axis=1)
    value = exact + 2.0 * float(rw @ (radial * rho ** (-1.0 - s)))
    inner = r * lower
    edge = abs(float(radial[0])) * rho[0] ** (-1.0 - s)
    truncation = 2.0 * edge * inner / max(2.0 - s, 1e-12)
    return value, truncation


def local_bound_ratio(u: GraphFunction, p, r: float, s: float, cfg=None) -> float:
    """max over quadrature nodes of |G_s(D) - G_s(b)| / (c1alpha_norm rho^alpha); <= 1 expected."""
    full = get_config() if cfg is None else cfg
    if u.holder_exponent is None or not np.isfinite(u.c1alpha_norm):
        return float("inf")
    p = np.asarray(p, dtype=float)
    alpha = min(u.holder_exponent, 1.0)
    n = u.dim + 1
    w, _ = _sphere_nodes(u.dim, full.curvature.angular_nodes)
    b = w @ np.atleast_1d(u.grad(p[:-1]))
    rho = r * np.geomspace(1e-6, 1.0, 60)
    D = (u.eval(p[:-1] + rho[:, None, None] * w[None, :, :]) - p[-1]) / rho[:, None]
    lhs = np.abs(G_kernel(n, s, D) - G_kernel(n, s, b)[None, :])
    rhs = max(u.c1alpha_norm, 1e-300) * rho[:, None] ** alpha
    return float(np.max(lhs / rhs))


def _tail_rule(n: int, r: float, h: float, exit_heights: Tuple[float, float], order: int,
               cfg) -> DirectionRule:
    cc = cfg.curvature
    if n == 2:
        corner = float(np.arctan2(h, r))
        lo, hi = exit_heights
        breaks = [corner, np.pi - corner, float(np.arctan2(hi, r)), float(np.arctan2(lo, -r))]
        return uniform_rule(2, panels=cc.tail_panels, order=order, angle_breaks=breaks)
    return uniform_rule(3, polar_panels=cc.tail_panels, polar_order=max(order // 2, 1),
                        azimuth_nodes=cc.angular_nodes, z_breaks=[h / np.hypot(r, h)])


def _tail_part(E: SetSpec, p: np.ndarray, r: float, h: float, s: float, order: int,
               exit_heights, cfg) -> Tuple[float, float]:
    qc = cfg.quadrature
    n = E.dim
    rule = _tail_rule(n, r, h, exit_heights, order, cfg)
    d = rule.dirs
    horiz = np.linalg.norm(d[:, :-1], axis=1)
    vert = np.abs(d[:, -1])
    with np.errstate(divide="ignore"):
        t_exit = np.minimum(np.where(horiz > 0, r / horiz, np.inf), np.where(vert > 0, h / vert, np.inf))
    rays = trace_rays(E, p, rule, t_exit, qc.far_radius * max(r, h),
                      samples_per_decade=qc.samples_per_decade,
                      iterations=qc.crossing_iterations, chunk=qc.chunk_rays)
    return rays.integral(s), rays.far_error(s)


def curvature_graph(u: GraphFunction, p, E_far: Optional[SetSpec], r: Optional[float], h: Optional[float],
                    s: float, cfg=None) -> CurvatureResult:
    """I_s[E](p) at a point of the graph of u.

    Args:
        u: Graph function, E is {x_n >= u(x')} near p
        p: Point (p', u(p'))
        E_far: The whole set (defaults to the supergraph of u)
        r: Cylinder radius (config default when None)
        h: Cylinder half-height (chosen from the graph when None)
        s: Fractional order, below the Holder exponent of grad u
        cfg: Full configuration

    Returns:
        CurvatureResult with the local/tail split

    Raises:
        FormulaNotApplicable: If s >= holder exponent
        GraphLeavesCylinder: If the graph still leaves the cylinder after shrinking
    """
    full = get_config() if cfg is None else cfg
    cc = full.curvature
    p = np.asarray(p, dtype=float)
    if p.size != u.dim + 1:
        raise InvalidParameter("p", p.tolist(), f"expected a point of R^{u.dim + 1}")
    if not 0.0 < s < 1.0:
        raise InvalidParameter("s", s, "must lie in (0, 1)")
    holder = 0.0 if u.holder_exponent is None else u.holder_exponent
    if s >= holder:
        raise FormulaNotApplicable(s, holder)
    if abs(float(u.eval(p[:-1])) - p[-1]) > 1e-9 * (1.0 + abs(p[-1])):
        raise InvalidParameter("p", p.tolist(), "point is not on the graph")
    E = Supergraph(u) if E_far is None else E_far

    r = cc.chart_radius if r is None else float(r)
    if h is None and cc.chart_height is None:
        h = max(r, 4.0 * graph_deviation(u, p, r, full))
    elif h is None:
        h = cc.chart_height
    for _ in range(cc.max_shrinks + 1):
        if graph_deviation(u, p, r, full) < 0.5 * h:
            break
        logger.info(f"Graph leaves Q(r={r:g}, h={h:g}) at {p.tolist()}; shrinking r")
        r *= 0.5
    else:
        raise GraphLeavesCylinder(r, h)

    use_hessian = holder >= 1.0
    order = cc.radial_order
    local, trunc = _local_part(u, p, r, s, order, use_hessian, full)
    local_coarse, _ = _local_part(u, p, r, s, max(order // 2, 1), use_hessian, full)

    exit_heights = (0.0, 0.0)
    if u.dim == 1:
        ends = u.eval(p[:-1] + np.array([[-r], [r]])) - p[-1]
        exit_heights = (float(ends[0]), float(ends[1]))
    tail, far = _tail_part(E, p, r, h, s, cc.tail_order, exit_heights, full)
    tail_coarse, _ = _tail_part(E, p, r, h, s, max(cc.tail_order // 2, 1), exit_heights, full)

    error = abs(local - local_coarse) + trunc + abs(tail - tail_coarse) + far
    ratio = local_bound_ratio(u, p, r, s, full) if np.isfinite(u.c1alpha_norm) else None
    logger.debug(f"curvature_graph s={s:g}: local={local:.6g} tail={tail:.6g} err={error:.2g}")
    return CurvatureResult.build(s, local, tail, error, r=r, h=h, method="graph", bound_ratio=ratio)
