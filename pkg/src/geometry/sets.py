"""
Set algebra for fracperim.

Every set is described by a level function that is negative inside,
positive outside and (approximately) zero on the boundary. Boolean
combinators act on level functions the usual constructive-geometry way:
complement negates, union takes the minimum, intersection the maximum.
Rigid motions and dilations act on the query point.

Level functions are vectorized: `level(X)` takes points of shape (..., n)
and returns shape (...). They are only required to have the right sign
near the boundary; the balls and half-spaces return exact signed
distances, the cones and supergraphs do not.
"""

import logging
from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from src.exceptions import DimensionMismatch, InvalidData, InvalidParameter
from src.geometry.graphs import GraphFunction, graph_from_dict, graph_to_dict

logger = logging.getLogger(__name__)

BOUNDARY_EPS = 1e-12


class Membership(Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"


def sphere_measure(n: int) -> float:
    """H^{n-1} of the unit sphere in R^n (0 for n = 0)."""
    if n < 0:
        raise InvalidParameter("n", n, "dimension must be nonnegative")
    if n == 0:
        return 0.0
    return float(2.0 * np.pi ** (n / 2.0) / special.gamma(n / 2.0))


def spherical_cap_measure(n: int, half_angle: float) -> float:
    """Measure of {theta in S^{n-1} : angle(theta, axis) < half_angle}."""
    half_angle = float(np.clip(half_angle, 0.0, np.pi))
    if n == 1:
        # S^0 = {axis, -axis}
        return (1.0 if half_angle > 0.0 else 0.0) + (1.0 if half_angle >= np.pi else 0.0)
    if n == 2:
        return 2.0 * half_angle
    if n == 3:
        return 2.0 * np.pi * (1.0 - np.cos(half_angle))
    value, _ = integrate.quad(lambda phi: np.sin(phi) ** (n - 2), 0.0, half_angle)
    return sphere_measure(n - 1) * value


def _as_points(X, dim: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != dim:
        raise DimensionMismatch(dim, X.shape[-1])
    return X


def _forward(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return np.where(np.isfinite(t) & (t > 0.0), t, np.nan)


def _plane_hits(w: np.ndarray, D: np.ndarray, normal: np.ndarray, offset: float = 0.0) -> np.ndarray:
    """t with (w + t D) . normal = offset, one column."""
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (offset - float(w @ normal)) / (D @ normal)
    return _forward(t)[:, None]


def _quadratic_hits(a, b, c) -> np.ndarray:
    """Positive real roots of a t^2 + b t + c, two columns (nan where missing)."""
    a, b, c = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float),
                                  np.asarray(c, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = b * b - 4.0 * a * c
        root = np.sqrt(np.where(disc >= 0.0, disc, np.nan))
        qv = -0.5 * (b + np.copysign(root, b))
        return np.column_stack([_forward(qv / a), _forward(c / qv)])


def _cone_hits(w: np.ndarray, D: np.ndarray, axis: np.ndarray, half_angle: float) -> np.ndarray:
    # Both nappes; the spurious roots only add samples
    c2 = np.cos(half_angle) ** 2
    du, wu = D @ axis, float(w @ axis)
    a = du * du - c2 * np.einsum("ij,ij->i", D, D)
    b = 2.0 * (du * wu - c2 * (D @ w))
    c = wu * wu - c2 * float(w @ w)
    return _quadratic_hits(a, b, c)


def _no_breaks(D: np.ndarray) -> np.ndarray:
    return np.empty((D.shape[0], 0))


def _stack(columns: List[np.ndarray], D: np.ndarray) -> np.ndarray:
    return np.concatenate(columns, axis=1) if columns else _no_breaks(D)


class SetSpec(ABC):
    """A measurable subset of R^n with decidable membership off the boundary."""

    dim: int

    @abstractmethod
    def _level(self, X: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        ...

    def level(self, X) -> np.ndarray:
        return self._level(_as_points(X, self.dim))

    def sign(self, X, eps: float = BOUNDARY_EPS) -> np.ndarray:
        """+1 outside, -1 inside, 0 within the boundary tolerance.

        This is chi_{CE} - chi_E away from the boundary.
        """
        X = _as_points(X, self.dim)
        lv = self._level(X)
        tol = eps * (1.0 + np.linalg.norm(X, axis=-1))
        return np.where(lv < -tol, -1, np.where(lv > tol, 1, 0))

    def contains(self, x, eps: float = BOUNDARY_EPS) -> Membership:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise InvalidData("point", f"expected a single point, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise InvalidData("point", "coordinates must be finite")
        code = int(self.sign(x, eps))
        if code < 0:
            return Membership.INSIDE
        if code > 0:
            return Membership.OUTSIDE
        return Membership.BOUNDARY

    def indicator(self, X) -> np.ndarray:
        return self.level(X) < 0.0

    def bounding_radius(self) -> Optional[float]:
        """Radius of a ball about the origin containing the set, None if unbounded."""
        return None

    def ray_breaks(self, q: np.ndarray, D: np.ndarray) -> np.ndarray:
        """Distances t > 0 at which q + t D may cross a primitive boundary.

        One row per direction in D (shape (m, n)), nan where a column has no
        hit. The list may hold extra values but misses no crossing of a
        primitive that has a closed form; the rest return no columns and are
        found by sampling alone.
        """
        return _no_breaks(D)

    def normal(self, x, step: float = 1e-7) -> np.ndarray:
        """Outward unit normal from centered differences of the level function."""
        x = _as_points(x, self.dim)
        h = step * (1.0 + float(np.linalg.norm(x)))
        E = np.eye(self.dim) * h
        grad = (self._level(x + E) - self._level(x - E)) / (2.0 * h)
        norm = float(np.linalg.norm(grad))
        if not np.isfinite(norm) or norm == 0.0:
            raise InvalidParameter("point", x.tolist(), "level function has no usable gradient here")
        return grad / norm

    # Combinator sugar
    def complement(self) -> "SetSpec":
        return Complement(self)

    def __or__(self, other: "SetSpec") -> "SetSpec":
        return Union([self, other])

    def __and__(self, other: "SetSpec") -> "SetSpec":
        return Intersection([self, other])

    def __sub__(self, other: "SetSpec") -> "SetSpec":
        return Intersection([self, Complement(other)])


# ========== Primitives ==========

class HalfSpace(SetSpec):
    """{x : x . normal > offset}."""

    def __init__(self, normal: Sequence[float], offset: float = 0.0):
        nu = np.asarray(normal, dtype=float)
        norm = float(np.linalg.norm(nu))
        if nu.ndim != 1 or norm == 0.0:
            raise InvalidParameter("normal", list(nu.ravel()), "must be a nonzero vector")
        self.normal_vector = nu / norm
        self.offset = float(offset) / norm
        self.dim = nu.size

    def _level(self, X):
        return self.offset - X @ self.normal_vector

    def passes_through(self, q, tol: float = 1e-12) -> bool:
        q = np.asarray(q, dtype=float)
        return abs(float(q @ self.normal_vector) - self.offset) <= tol * (1.0 + float(np.linalg.norm(q)))

    def ray_breaks(self, q, D):
        return _plane_hits(q, D, self.normal_vector, self.offset)

    def to_dict(self):
        return {"type": "halfspace", "normal": self.normal_vector.tolist(), "offset": self.offset}


class Ball(SetSpec):
    def __init__(self, center: Sequence[float], radius: float):
        if radius <= 0:
            raise InvalidParameter("radius", radius, "must be positive")
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.dim = self.center.size

    def _level(self, X):
        return np.linalg.norm(X - self.center, axis=-1) - self.radius

    def bounding_radius(self):
        return float(np.linalg.norm(self.center)) + self.radius

    def ray_breaks(self, q, D):
        w = q - self.center
        return _quadratic_hits(np.einsum("ij,ij->i", D, D), 2.0 * (D @ w),
                               float(w @ w) - self.radius ** 2)

    def to_dict(self):
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius}


class SphericalCone(SetSpec):
    """Cone {apex + t sigma : t > 0, sigma in S} over a spherical region S.

    S is either a cap (axis + half_angle) or a product of angle intervals:
    in R^1 and R^2 a single interval for the polar angle atan2(x_2, x_1)
    (in R^1 the angle is 0 on the positive and pi on the negative side);
    in R^3 an azimuth interval followed by an interval for the angle from
    e_3.
    """

    def __init__(self, apex: Sequence[float], axis: Optional[Sequence[float]] = None,
                 half_angle: Optional[float] = None,
                 intervals: Optional[Sequence[Tuple[float, float]]] = None):
        self.apex = np.asarray(apex, dtype=float)
        self.dim = self.apex.size
        if (axis is None) == (intervals is None):
            raise InvalidParameter("cone", None, "give either axis + half_angle or intervals")
        if axis is not None:
            a = np.asarray(axis, dtype=float)
            if a.size != self.dim or np.linalg.norm(a) == 0.0:
                raise InvalidParameter("axis", list(a.ravel()), "must be a nonzero vector of the cone dimension")
            if half_angle is None or not 0.0 < half_angle < np.pi:
                raise InvalidParameter("half_angle", half_angle, "must lie in (0, pi)")
            self.axis = a / np.linalg.norm(a)
            self.half_angle = float(half_angle)
            self.intervals = None
        else:
            ivs = tuple((float(lo), float(hi)) for lo, hi in intervals)
            expected = 1 if self.dim <= 2 else 2
            if self.dim > 3 or len(ivs) != expected:
                raise InvalidParameter("intervals", ivs, f"need {expected} interval(s) in R^{self.dim}")
            for lo, hi in ivs:
                if not hi > lo:
                    raise InvalidParameter("intervals", ivs, "each interval needs hi > lo")
            if ivs[0][1] - ivs[0][0] > 2.0 * np.pi:
                raise InvalidParameter("intervals", ivs, "azimuth interval longer than 2 pi")
            if self.dim == 3 and not (0.0 <= ivs[1][0] and ivs[1][1] <= np.pi):
                raise InvalidParameter("intervals", ivs, "polar interval must lie in [0, pi]")
            self.axis = None
            self.half_angle = None
            self.intervals = ivs

    @staticmethod
    def _wrapped_excess(phi: np.ndarray, lo: float, hi: float) -> np.ndarray:
        mid = 0.5 * (lo + hi)
        d = np.angle(np.exp(1j * (phi - mid)))
        return np.abs(d) - 0.5 * (hi - lo)

    def _angular_excess(self, D: np.ndarray) -> np.ndarray:
        """Signed angular distance of directions D to S (negative inside)."""
        r = np.linalg.norm(D, axis=-1)
        safe = np.where(r > 0.0, r, 1.0)
        if self.axis is not None:
            cosang = np.clip((D @ self.axis) / safe, -1.0, 1.0)
            return np.arccos(cosang) - self.half_angle
        if self.dim == 1:
            phi = np.where(D[..., 0] >= 0.0, 0.0, np.pi)
            return self._wrapped_excess(phi, *self.intervals[0])
        phi = np.arctan2(D[..., 1], D[..., 0])
        excess = self._wrapped_excess(phi, *self.intervals[0])
        if self.dim == 3:
            theta = np.arccos(np.clip(D[..., 2] / safe, -1.0, 1.0))
            lo, hi = self.intervals[1]
            excess = np.maximum(excess, np.maximum(lo - theta, theta - hi))
        return excess

    def _level(self, X):
        D = X - self.apex
        return np.linalg.norm(D, axis=-1) * self._angular_excess(D)

    def direction_sign(self, D) -> np.ndarray:
        """Membership code of the rays apex + t D (ignores |D|)."""
        return np.sign(self._angular_excess(np.asarray(D, dtype=float)))

    def ray_breaks(self, q, D):
        w = q - self.apex
        if self.axis is not None:
            return _cone_hits(w, D, self.axis, self.half_angle)
        if self.dim == 1:
            with np.errstate(divide="ignore", invalid="ignore"):
                return _forward(-w[0] / D[:, 0])[:, None]
        columns = []
        for phi in self.intervals[0]:
            normal = np.zeros(self.dim)
            normal[:2] = (-np.sin(phi), np.cos(phi))
            columns.append(_plane_hits(w, D, normal))
        if self.dim == 3:
            e3 = np.array([0.0, 0.0, 1.0])
            for theta in self.intervals[1]:
                if 0.0 < theta < np.pi:
                    columns.append(_cone_hits(w, D, e3, theta))
        return _stack(columns, D)

    def cap_measure(self) -> float:
        """H^{n-1} of S, the opening of the cone."""
        if self.axis is not None:
            return spherical_cap_measure(self.dim, self.half_angle)
        lo, hi = self.intervals[0]
        if self.dim == 1:
            phis = np.array([0.0, np.pi])
            return float(np.sum(self._wrapped_excess(phis, lo, hi) < 0.0))
        if self.dim == 2:
            return hi - lo
        tlo, thi = self.intervals[1]
        return (hi - lo) * (np.cos(tlo) - np.cos(thi))

    def to_dict(self):
        data = {"type": "cone", "apex": self.apex.tolist()}
        if self.axis is not None:
            data.update(axis=self.axis.tolist(), half_angle=self.half_angle)
        else:
            data.update(intervals=[list(iv) for iv in self.intervals])
        return data


class Supergraph(SetSpec):
    """{x : x_axis >= u(x without x_axis)}."""

    def __init__(self, graph: GraphFunction, axis: Optional[int] = None):
        self.graph = graph
        self.dim = graph.dim + 1
        self.axis = self.dim - 1 if axis is None else int(axis)
        if not 0 <= self.axis < self.dim:
            raise InvalidParameter("axis", axis, f"must lie in [0, {self.dim})")

    def split(self, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return np.delete(X, self.axis, axis=-1), X[..., self.axis]

    def _level(self, X):
        Y, height = self.split(X)
        return self.graph.eval(Y) - height

    def to_dict(self):
        return {"type": "supergraph", "graph": graph_to_dict(self.graph), "axis": self.axis}


class Raster(SetSpec):
    """Occupancy grid of cubic cells, with a fallback set outside the grid box."""

    def __init__(self, occupancy, origin: Sequence[float], cell: float,
                 outside: Optional[SetSpec] = None):
        self.occupancy = np.asarray(occupancy, dtype=bool)
        self.origin = np.asarray(origin, dtype=float)
        self.cell = float(cell)
        self.dim = self.occupancy.ndim
        if self.origin.size != self.dim:
            raise DimensionMismatch(self.dim, self.origin.size)
        if self.cell <= 0:
            raise InvalidParameter("cell", cell, "must be positive")
        self.outside = outside if outside is not None else EmptySet(self.dim)
        if self.outside.dim != self.dim:
            raise DimensionMismatch(self.dim, self.outside.dim)

    def _level(self, X):
        idx = np.floor((X - self.origin) / self.cell).astype(np.int64)
        shape = np.array(self.occupancy.shape)
        in_box = np.all((idx >= 0) & (idx < shape), axis=-1)
        clipped = np.clip(idx, 0, shape - 1)
        occupied = self.occupancy[tuple(np.moveaxis(clipped, -1, 0))]
        inner = np.where(occupied, -0.5 * self.cell, 0.5 * self.cell)
        if np.all(in_box):
            return inner
        return np.where(in_box, inner, self.outside.level(X))

    def bounding_radius(self):
        inner = self.outside.bounding_radius()
        if inner is None:
            return None
        far = self.origin + self.cell * np.array(self.occupancy.shape)
        corner = np.maximum(np.abs(self.origin), np.abs(far))
        return max(inner, float(np.linalg.norm(corner)))

    def ray_breaks(self, q, D):
        columns = [self.outside.ray_breaks(q, D)]
        for i, count in enumerate(self.occupancy.shape):
            planes = self.origin[i] + self.cell * np.arange(count + 1)
            with np.errstate(divide="ignore", invalid="ignore"):
                columns.append(_forward((planes[None, :] - q[i]) / D[:, i, None]))
        return _stack(columns, D)

    def to_dict(self):
        return {"type": "raster", "occupancy": self.occupancy.astype(int).tolist(),
                "origin": self.origin.tolist(), "cell": self.cell,
                "outside": self.outside.to_dict()}


class EmptySet(SetSpec):
    def __init__(self, dim: int):
        self.dim = int(dim)

    def _level(self, X):
        return np.full(X.shape[:-1], np.inf)

    def bounding_radius(self):
        return 0.0

    def to_dict(self):
        return {"type": "empty", "dim": self.dim}


class FullSet(SetSpec):
    def __init__(self, dim: int):
        self.dim = int(dim)

    def _level(self, X):
        return np.full(X.shape[:-1], -np.inf)

    def to_dict(self):
        return {"type": "full", "dim": self.dim}


# ========== Combinators ==========

class Complement(SetSpec):
    def __init__(self, inner: SetSpec):
        self.inner = inner
        self.dim = inner.dim

    def _level(self, X):
        return -self.inner._level(X)

    def ray_breaks(self, q, D):
        return self.inner.ray_breaks(q, D)

    def to_dict(self):
        return {"op": "complement", "args": [self.inner.to_dict()]}


def _check_same_dim(parts: List[SetSpec]) -> int:
    if not parts:
        raise InvalidParameter("args", [], "need at least one operand")
    dim = parts[0].dim
    for p in parts[1:]:
        if p.dim != dim:
            raise DimensionMismatch(dim, p.dim)
    return dim


class Union(SetSpec):
    def __init__(self, parts: Sequence[SetSpec]):
        self.parts = list(parts)
        self.dim = _check_same_dim(self.parts)

    def _level(self, X):
        out = self.parts[0]._level(X)
        for p in self.parts[1:]:
            out = np.minimum(out, p._level(X))
        return out

    def bounding_radius(self):
        radii = [p.bounding_radius() for p in self.parts]
        return None if any(r is None for r in radii) else max(radii)

    def ray_breaks(self, q, D):
        return _stack([p.ray_breaks(q, D) for p in self.parts], D)

    def to_dict(self):
        return {"op": "union", "args": [p.to_dict() for p in self.parts]}


class Intersection(SetSpec):
    def __init__(self, parts: Sequence[SetSpec]):
        self.parts = list(parts)
        self.dim = _check_same_dim(self.parts)

    def _level(self, X):
        out = self.parts[0]._level(X)
        for p in self.parts[1:]:
            out = np.maximum(out, p._level(X))
        return out

    def bounding_radius(self):
        radii = [r for r in (p.bounding_radius() for p in self.parts) if r is not None]
        return min(radii) if radii else None

    def ray_breaks(self, q, D):
        return _stack([p.ray_breaks(q, D) for p in self.parts], D)

    def to_dict(self):
        return {"op": "intersection", "args": [p.to_dict() for p in self.parts]}


class Translate(SetSpec):
    """E + v: contains x iff E contains x - v."""

    def __init__(self, inner: SetSpec, vector: Sequence[float]):
        self.inner = inner
        self.vector = np.asarray(vector, dtype=float)
        self.dim = inner.dim
        if self.vector.size != self.dim:
            raise DimensionMismatch(self.dim, self.vector.size)

    def _level(self, X):
        return self.inner._level(X - self.vector)

    def bounding_radius(self):
        r = self.inner.bounding_radius()
        return None if r is None else r + float(np.linalg.norm(self.vector))

    def ray_breaks(self, q, D):
        return self.inner.ray_breaks(q - self.vector, D)

    def to_dict(self):
        return {"op": "translate", "args": [self.inner.to_dict()], "vector": self.vector.tolist()}


class Rotate(SetSpec):
    """R E: contains R x iff E contains x."""

    def __init__(self, inner: SetSpec, matrix):
        R = np.asarray(matrix, dtype=float)
        if R.shape != (inner.dim, inner.dim):
            raise DimensionMismatch(inner.dim, R.shape[0] if R.ndim else 0)
        if not np.allclose(R @ R.T, np.eye(inner.dim), atol=1e-10):
            raise InvalidParameter("matrix", R.tolist(), "must be orthogonal")
        self.inner = inner
        self.matrix = R
        self.dim = inner.dim

    def _level(self, X):
        # R^T x for row vectors
        return self.inner._level(X @ self.matrix)

    def bounding_radius(self):
        return self.inner.bounding_radius()

    def ray_breaks(self, q, D):
        return self.inner.ray_breaks(q @ self.matrix, D @ self.matrix)

    def to_dict(self):
        return {"op": "rotate", "args": [self.inner.to_dict()], "matrix": self.matrix.tolist()}


class Scale(SetSpec):
    """lambda E: contains x iff E contains x / lambda."""

    def __init__(self, inner: SetSpec, factor: float):
        if factor <= 0:
            raise InvalidParameter("factor", factor, "must be positive")
        self.inner = inner
        self.factor = float(factor)
        self.dim = inner.dim

    def _level(self, X):
        return self.factor * self.inner._level(X / self.factor)

    def bounding_radius(self):
        r = self.inner.bounding_radius()
        return None if r is None else self.factor * r

    def ray_breaks(self, q, D):
        # same t: q + t D scales to q / lambda + t D / lambda
        return self.inner.ray_breaks(q / self.factor, D / self.factor)

    def to_dict(self):
        return {"op": "scale", "args": [self.inner.to_dict()], "factor": self.factor}


# ========== JSON round trip ==========

def set_to_dict(E: SetSpec) -> Dict[str, Any]:
    return E.to_dict()


def set_from_dict(data: Dict[str, Any]) -> SetSpec:
    """Rebuild a SetSpec from its JSON description.

    Raises:
        InvalidData: If a node is neither a known primitive nor a known combinator
    """
    if not isinstance(data, dict):
        raise InvalidData("set-spec", f"expected an object, got {type(data).__name__}")
    if "op" in data:
        op = data["op"]
        args = [set_from_dict(a) for a in data.get("args", [])]
        if op == "complement":
            return Complement(args[0])
        if op == "union":
            return Union(args)
        if op == "intersection":
            return Intersection(args)
        if op == "translate":
            return Translate(args[0], data["vector"])
        if op == "rotate":
            return Rotate(args[0], data["matrix"])
        if op == "scale":
            return Scale(args[0], data["factor"])
        raise InvalidData("set-spec", f"unknown combinator '{op}'")

    kind = data.get("type")
    try:
        if kind == "halfspace":
            return HalfSpace(data["normal"], data.get("offset", 0.0))
        if kind == "ball":
            return Ball(data["center"], data["radius"])
        if kind == "cone":
            intervals = data.get("intervals")
            return SphericalCone(
                data["apex"], axis=data.get("axis"), half_angle=data.get("half_angle"),
                intervals=None if intervals is None else [tuple(iv) for iv in intervals],
            )
        if kind == "supergraph":
            return Supergraph(graph_from_dict(data["graph"]), data.get("axis"))
        if kind == "raster":
            return Raster(data["occupancy"], data["origin"], data["cell"],
                          set_from_dict(data["outside"]) if "outside" in data else None)
        if kind == "domain":
            from src.geometry.domain import Domain
            return Domain.from_dict(data["domain"]).as_set()
        if kind == "empty":
            return EmptySet(data["dim"])
        if kind == "full":
            return FullSet(data["dim"])
    except KeyError as e:
        raise InvalidData("set-spec", f"'{kind}' node is missing field {e}")
    raise InvalidData("set-spec", f"unknown primitive '{kind}'")
