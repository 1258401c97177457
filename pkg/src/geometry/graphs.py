"""
Graph functions u: R^{n-1} -> R.

A `GraphFunction` carries evaluation, gradient and (optionally) Hessian
callables, the C^{1,alpha} metadata the curvature formula relies on, and
a growth tag the alpha module uses to route to closed forms.

All callables are vectorized over leading axes: `eval(Y)` takes points
of shape (..., dim) and returns shape (...).
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from src.exceptions import InvalidParameter

logger = logging.getLogger(__name__)

GROWTH_KINDS = ("bounded", "sublinear", "linear_cone", "superlinear", "cubic_like", "custom")


@dataclass(frozen=True)
class GrowthTag:
    """Asymptotic behaviour of a graph at infinity."""
    kind: str
    params: Tuple[Tuple[str, Any], ...] = ()

    def __post_init__(self):
        if self.kind not in GROWTH_KINDS:
            raise InvalidParameter("growth_tag", self.kind, f"must be one of {GROWTH_KINDS}")

    def get(self, key: str, default=None):
        return dict(self.params).get(key, default)


@dataclass(frozen=True, eq=False)
class GraphFunction:
    """A graph x_n = u(x') over R^{dim}, dim = n - 1."""
    dim: int
    eval_fn: Callable[[np.ndarray], np.ndarray]
    grad_fn: Callable[[np.ndarray], np.ndarray]
    holder_exponent: Optional[float]
    c1alpha_norm: float
    norm_center: Tuple[float, ...]
    norm_radius: float
    growth_tag: GrowthTag
    hess_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    family: str = "custom"
    params: Dict[str, Any] = field(default_factory=dict)

    def eval(self, Y) -> np.ndarray:
        Y = np.asarray(Y, dtype=float)
        return self.eval_fn(Y)

    def grad(self, Y) -> np.ndarray:
        Y = np.asarray(Y, dtype=float)
        return self.grad_fn(Y)

    def hessian(self, y, step: float = 1e-4) -> np.ndarray:
        """Hessian at a single point; centered differences when no closed form."""
        y = np.asarray(y, dtype=float)
        if self.hess_fn is not None:
            return np.asarray(self.hess_fn(y), dtype=float)
        d = self.dim
        H = np.zeros((d, d))
        E = np.eye(d) * step
        f0 = float(self.eval(y))
        for i in range(d):
            H[i, i] = (float(self.eval(y + E[i])) - 2.0 * f0 + float(self.eval(y - E[i]))) / step ** 2
            for j in range(i + 1, d):
                pp = float(self.eval(y + E[i] + E[j]))
                pm = float(self.eval(y + E[i] - E[j]))
                mp = float(self.eval(y - E[i] + E[j]))
                mm = float(self.eval(y - E[i] - E[j]))
                H[i, j] = H[j, i] = (pp - pm - mp + mm) / (4.0 * step ** 2)
        return H

    def holder_violation(self, center=None, radius: Optional[float] = None,
                         samples: int = 200, seed: int = 0) -> float:
        """Largest ratio |v(y)-v(p)-grad v(p).(y-p)| / (norm |y-p|^{1+alpha}) on sampled pairs.

        Values <= 1 mean the stated C^{1,alpha} norm is consistent with the samples.
        """
        if self.holder_exponent is None:
            return float("inf")
        center = np.asarray(self.norm_center if center is None else center, dtype=float)
        radius = self.norm_radius if radius is None else radius
        rng = np.random.default_rng(seed)
        P = center + radius * _ball_samples(rng, samples, self.dim)
        Y = center + radius * _ball_samples(rng, samples, self.dim)
        diff = Y - P
        dist = np.linalg.norm(diff, axis=-1)
        keep = dist > 1e-9 * radius
        P, Y, diff, dist = P[keep], Y[keep], diff[keep], dist[keep]
        lhs = np.abs(self.eval(Y) - self.eval(P) - np.sum(self.grad(P) * diff, axis=-1))
        rhs = max(self.c1alpha_norm, 1e-300) * dist ** (1.0 + self.holder_exponent)
        return float(np.max(lhs / rhs)) if lhs.size else 0.0

    def gradient_mismatch(self, points, step: float = 1e-6) -> float:
        """Max difference between grad and centered differences of eval."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        fd = np.empty_like(P)
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = step
            fd[:, i] = (self.eval(P + e) - self.eval(P - e)) / (2.0 * step)
        return float(np.max(np.abs(fd - self.grad(P))))


def _ball_samples(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    g = rng.normal(size=(count, dim))
    g /= np.linalg.norm(g, axis=-1, keepdims=True)
    r = rng.random(count) ** (1.0 / dim)
    return g * r[:, None]


def _first(Y: np.ndarray) -> np.ndarray:
    return Y[..., 0]


def _sq(Y: np.ndarray) -> np.ndarray:
    return np.sum(Y * Y, axis=-1)


# ========== Families ==========

def flat_graph(dim: int, level: float = 0.0) -> GraphFunction:
    return GraphFunction(
        dim=dim,
        eval_fn=lambda Y: np.full(Y.shape[:-1], float(level)),
        grad_fn=lambda Y: np.zeros(Y.shape),
        hess_fn=lambda y: np.zeros((dim, dim)),
        holder_exponent=1.0,
        c1alpha_norm=abs(level),
        norm_center=(0.0,) * dim,
        norm_radius=1.0,
        growth_tag=GrowthTag("bounded", (("M", abs(level) + 1.0),)),
        family="flat",
        params={"dim": dim, "level": level},
    )


def cubic_graph(dim: int = 1) -> GraphFunction:
    """u(x') = x_1^3."""

    def grad(Y):
        G = np.zeros(Y.shape)
        G[..., 0] = 3.0 * Y[..., 0] ** 2
        return G

    def hess(y):
        H = np.zeros((dim, dim))
        H[0, 0] = 6.0 * y[0]
        return H

    return GraphFunction(
        dim=dim,
        eval_fn=lambda Y: _first(Y) ** 3,
        grad_fn=grad,
        hess_fn=hess,
        holder_exponent=1.0,
        # sup|u| + sup|u'| + Lip(u') on B'_1
        c1alpha_norm=1.0 + 3.0 + 6.0,
        norm_center=(0.0,) * dim,
        norm_radius=1.0,
        growth_tag=GrowthTag("cubic_like"),
        family="cubic",
        params={"dim": dim},
    )


def parabola_graph(dim: int = 1, c: float = 1.0) -> GraphFunction:
    """u(x') = c |x'|^2; the growth tag records the sign of c (c = 0 is flat)."""
    if c == 0.0:
        growth = GrowthTag("bounded", (("M", 0.0),))
    else:
        growth = GrowthTag("superlinear", (("exponent", 2.0), ("sign", float(np.sign(c)))))
    return GraphFunction(
        dim=dim,
        eval_fn=lambda Y: c * _sq(Y),
        grad_fn=lambda Y: 2.0 * c * Y,
        hess_fn=lambda y: 2.0 * c * np.eye(dim),
        holder_exponent=1.0,
        c1alpha_norm=abs(c) * (1.0 + 2.0 + 2.0),
        norm_center=(0.0,) * dim,
        norm_radius=1.0,
        growth_tag=growth,
        family="parabola",
        params={"dim": dim, "c": c},
    )


def tanh_graph(dim: int = 1) -> GraphFunction:
    """u(x') = tanh(x_1), bounded by M = 1."""

    def grad(Y):
        G = np.zeros(Y.shape)
        G[..., 0] = 1.0 / np.cosh(Y[..., 0]) ** 2
        return G

    def hess(y):
        H = np.zeros((dim, dim))
        H[0, 0] = -2.0 * np.tanh(y[0]) / np.cosh(y[0]) ** 2
        return H

    return GraphFunction(
        dim=dim,
        eval_fn=lambda Y: np.tanh(_first(Y)),
        grad_fn=grad,
        hess_fn=hess,
        holder_exponent=1.0,
        c1alpha_norm=1.0 + 1.0 + 4.0 / (3.0 * np.sqrt(3.0)),
        norm_center=(0.0,) * dim,
        norm_radius=1.0,
        growth_tag=GrowthTag("bounded", (("M", 1.0),)),
        family="tanh",
        params={"dim": dim},
    )


def sublinear_graph(dim: int = 1, c: float = 1.0, eps: float = 0.5) -> GraphFunction:
    """u(x') = c (1 + |x'|^2)^{(1-eps)/2}, a smooth version of c|x'|^{1-eps}."""
    if not 0.0 < eps <= 1.0:
        raise InvalidParameter("eps", eps, "must lie in (0, 1]")
    p = 0.5 * (1.0 - eps)

    def grad(Y):
        return (2.0 * c * p * (1.0 + _sq(Y)) ** (p - 1.0))[..., None] * Y

    def hess(y):
        w = 1.0 + float(y @ y)
        return 2.0 * c * p * (w ** (p - 1.0) * np.eye(dim)
                              + 2.0 * (p - 1.0) * w ** (p - 2.0) * np.outer(y, y))

    return GraphFunction(
        dim=dim,
        eval_fn=lambda Y: c * (1.0 + _sq(Y)) ** p,
        grad_fn=grad,
        hess_fn=hess,
        holder_exponent=1.0,
        c1alpha_norm=abs(c) * (2.0 ** p + 2.0 * p + 2.0 * p),
        norm_center=(0.0,) * dim,
        norm_radius=1.0,
        growth_tag=GrowthTag("sublinear", (("c", c), ("eps", eps))),
        family="sublinear",
        params={"dim": dim, "c": c, "eps": eps},
    )


def lower_sphere_graph(dim: int = 1, radius: float = 1.0,
                       center: Tuple[float, ...] = None) -> GraphFunction:
    """Lower hemisphere x_n = c_n - sqrt(R^2 - |x' - c'|^2), valid for |x' - c'| < R."""
    center = tuple(center) if center is not None else (0.0,) * (dim + 1)
    cp = np.asarray(center[:dim], dtype=float)
    cn = float(center[dim])
    R2 = radius * radius

    def root(Y):
        return np.sqrt(np.maximum(R2 - _sq(Y - cp), 0.0))

    def grad(Y):
        return (Y - cp) / np.maximum(root(Y), 1e-300)[..., None]

    def hess(y):
        d = y - cp
        w = float(np.sqrt(max(R2 - d @ d, 1e-300)))
        return np.eye(dim) / w + np.outer(d, d) / w ** 3

    half = 0.5 * radius
    # second derivative bound on the ball of radius R/2 around c'
    lip = radius ** 2 / (R2 - half ** 2) ** 1.5
    return GraphFunction(
        dim=dim,
        eval_fn=lambda Y: cn - root(Y),
        grad_fn=grad,
        hess_fn=hess,
        holder_exponent=1.0,
        c1alpha_norm=abs(cn) + radius + half / np.sqrt(R2 - half ** 2) + lip,
        norm_center=tuple(cp),
        norm_radius=half,
        growth_tag=GrowthTag("custom"),
        family="lower_sphere",
        params={"dim": dim, "radius": radius, "center": list(center)},
    )


def linear_cone_graph(dim: int, k: float, cone, x0: Tuple[float, ...] = None) -> GraphFunction:
    """u(x') = k |x' - x0'| on the cone X generated by `cone` at x0', 0 elsewhere.

    `cone` is a SphericalCone in R^{dim} with apex at the origin; only its
    directions are used. The graph is Lipschitz but not C^{1,alpha}.
    """
    if k <= 0:
        raise InvalidParameter("k", k, "slope must be positive")
    x0 = np.zeros(dim) if x0 is None else np.asarray(x0, dtype=float)

    def value(Y):
        D = Y - x0
        on_cone = cone.sign(D) < 0
        return np.where(on_cone, k * np.linalg.norm(D, axis=-1), 0.0)

    def grad(Y):
        D = Y - x0
        on_cone = (cone.sign(D) < 0)[..., None]
        norm = np.maximum(np.linalg.norm(D, axis=-1, keepdims=True), 1e-300)
        return np.where(on_cone, k * D / norm, 0.0)

    return GraphFunction(
        dim=dim,
        eval_fn=value,
        grad_fn=grad,
        holder_exponent=None,
        c1alpha_norm=float("inf"),
        norm_center=tuple(x0),
        norm_radius=1.0,
        growth_tag=GrowthTag("linear_cone", (("k", k), ("cap_measure", cone.cap_measure()))),
        family="linear_cone",
        params={"dim": dim, "k": k, "cone": cone.to_dict(), "x0": list(map(float, x0))},
    )


def perturbed_graph(base: GraphFunction, eta: float, center=None, width: float = 0.5) -> GraphFunction:
    """base + eta * psi with psi a smooth bump of unit height supported in B'_width(center)."""
    c = np.zeros(base.dim) if center is None else np.asarray(center, dtype=float)
    w2 = width * width

    def bump(Y):
        r2 = _sq(Y - c) / w2
        inside = r2 < 1.0
        safe = np.where(inside, 1.0 - r2, 1.0)
        return np.where(inside, np.exp(1.0 - 1.0 / safe), 0.0)

    def bump_grad(Y):
        r2 = _sq(Y - c) / w2
        inside = r2 < 1.0
        safe = np.where(inside, 1.0 - r2, 1.0)
        factor = np.where(inside, -np.exp(1.0 - 1.0 / safe) * 2.0 / (w2 * safe ** 2), 0.0)
        return factor[..., None] * (Y - c)

    return GraphFunction(
        dim=base.dim,
        eval_fn=lambda Y: base.eval_fn(Y) + eta * bump(Y),
        grad_fn=lambda Y: base.grad_fn(Y) + eta * bump_grad(Y),
        hess_fn=None,
        holder_exponent=base.holder_exponent,
        c1alpha_norm=base.c1alpha_norm + abs(eta) * (1.0 + 4.0 / width + 16.0 / w2),
        norm_center=base.norm_center,
        norm_radius=base.norm_radius,
        growth_tag=base.growth_tag,
        family="perturbed",
        params={"base": base.family, "eta": eta, "width": width, "center": list(map(float, c))},
    )


GRAPH_FAMILIES: Dict[str, Callable[..., GraphFunction]] = {
    "flat": flat_graph,
    "cubic": cubic_graph,
    "parabola": parabola_graph,
    "tanh": tanh_graph,
    "sublinear": sublinear_graph,
    "lower_sphere": lower_sphere_graph,
}


def graph_from_dict(data: Dict[str, Any]) -> GraphFunction:
    """Rebuild a graph from its {"family": ..., "params": {...}} description."""
    family = data.get("family")
    params = dict(data.get("params", {}))
    if family == "linear_cone":
        from src.geometry.sets import set_from_dict
        cone = set_from_dict(params["cone"])
        return linear_cone_graph(params["dim"], params["k"], cone, params.get("x0"))
    if family not in GRAPH_FAMILIES:
        raise InvalidParameter("family", family, "unknown graph family")
    return GRAPH_FAMILIES[family](**params)


def graph_to_dict(graph: GraphFunction) -> Dict[str, Any]:
    if graph.family not in GRAPH_FAMILIES and graph.family != "linear_cone":
        raise InvalidParameter("family", graph.family, "graph family is not serializable")
    return {"family": graph.family, "params": dict(graph.params)}
