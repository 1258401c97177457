"""
Reference domains Omega: balls and axis-aligned boxes.

Signed distance is exact for both shapes (negative inside). Erosion and
dilation take sublevel sets {d < delta} of the signed distance; a
dilated box is a rounded box, stored as the box plus an offset.
"""

import logging
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.exceptions import DimensionMismatch, InvalidData, InvalidParameter, ThresholdExceeded
from src.geometry.sets import Ball, HalfSpace, SetSpec, sphere_measure

logger = logging.getLogger(__name__)

SHAPES = ("ball", "box")


@dataclass(frozen=True)
class Domain:
    """Ball(center, radius) or Box(center, half_widths), optionally offset outward.

    The represented set is {x : d_shape(x) - offset < 0}.
    """
    shape: str
    n: int
    center: Tuple[float, ...]
    r0: float
    radius: Optional[float] = None
    half_widths: Optional[Tuple[float, ...]] = None
    offset: float = 0.0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise InvalidParameter("shape", self.shape, f"must be one of {SHAPES}")
        if len(self.center) != self.n:
            raise DimensionMismatch(self.n, len(self.center))
        if self.shape == "ball":
            if self.radius is None or self.radius <= 0:
                raise InvalidParameter("radius", self.radius, "must be positive")
        else:
            if self.half_widths is None or len(self.half_widths) != self.n:
                raise InvalidParameter("half_widths", self.half_widths, f"need {self.n} positive values")
            if min(self.half_widths) <= 0:
                raise InvalidParameter("half_widths", self.half_widths, "must be positive")
        if self.offset < 0:
            raise InvalidParameter("offset", self.offset, "must be nonnegative")
        if not 0 < self.r0 <= self.inradius() + 1e-12:
            raise InvalidParameter("r0", self.r0, f"must lie in (0, inradius={self.inradius():.6g}]")

    @classmethod
    def ball(cls, center, radius: float, r0: Optional[float] = None) -> "Domain":
        center = tuple(float(c) for c in center)
        return cls("ball", len(center), center, radius if r0 is None else r0, radius=float(radius))

    @classmethod
    def box(cls, lo, hi, r0: Optional[float] = None) -> "Domain":
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if lo.shape != hi.shape or np.any(hi <= lo):
            raise InvalidParameter("box", (lo.tolist(), hi.tolist()), "need lo < hi componentwise")
        half = tuple(0.5 * (hi - lo))
        return cls("box", lo.size, tuple(0.5 * (lo + hi)), min(half) if r0 is None else r0,
                   half_widths=half)

    def inradius(self) -> float:
        base = self.radius if self.shape == "ball" else min(self.half_widths)
        return base + self.offset

    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        c = np.asarray(self.center)
        if self.shape == "ball":
            ext = np.full(self.n, self.radius + self.offset)
        else:
            ext = np.asarray(self.half_widths) + self.offset
        return c - ext, c + ext

    def volume(self) -> float:
        """Lebesgue measure of the domain."""
        if self.shape == "ball":
            R = self.radius + self.offset
            return sphere_measure(self.n) * R ** self.n / self.n
        b = np.asarray(self.half_widths)
        if self.offset == 0.0:
            return float(np.prod(2.0 * b))
        # Steiner formula for a box in R^1 / R^2 / R^3
        d = self.offset
        if self.n == 1:
            return float(2.0 * b[0] + 2.0 * d)
        if self.n == 2:
            return float(4.0 * b[0] * b[1] + 4.0 * d * (b[0] + b[1]) + np.pi * d * d)
        if self.n == 3:
            area = 8.0 * (b[0] * b[1] + b[1] * b[2] + b[0] * b[2])
            return float(8.0 * np.prod(b) + area * d + 2.0 * np.pi * d * d * np.sum(b)
                         + 4.0 / 3.0 * np.pi * d ** 3)
        raise InvalidParameter("n", self.n, "rounded box volume needs n <= 3")

    def to_dict(self) -> Dict[str, Any]:
        data = {"shape": self.shape, "n": self.n, "center": list(self.center), "r0": self.r0,
                "offset": self.offset}
        if self.shape == "ball":
            data["radius"] = self.radius
        else:
            data["half_widths"] = list(self.half_widths)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Domain":
        try:
            return cls(
                shape=data["shape"], n=int(data["n"]), center=tuple(data["center"]),
                r0=float(data["r0"]), radius=data.get("radius"),
                half_widths=None if data.get("half_widths") is None else tuple(data["half_widths"]),
                offset=float(data.get("offset", 0.0)),
            )
        except KeyError as e:
            raise InvalidData("domain", f"missing field {e}")

    def as_set(self) -> "DomainSet":
        return DomainSet(self)


def signed_distance(omega: Domain, x) -> np.ndarray:
    """d(x, Omega) - d(x, C Omega), vectorized over leading axes."""
    X = np.asarray(x, dtype=float)
    if X.shape[-1] != omega.n:
        raise DimensionMismatch(omega.n, X.shape[-1])
    D = X - np.asarray(omega.center)
    if omega.shape == "ball":
        base = np.linalg.norm(D, axis=-1) - omega.radius
    else:
        q = np.abs(D) - np.asarray(omega.half_widths)
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
        inside = np.minimum(np.max(q, axis=-1), 0.0)
        base = outside + inside
    out = base - omega.offset
    return float(out) if np.ndim(out) == 0 else out


def eroded_domain(omega: Domain, delta: float) -> Domain:
    """Omega_delta = {signed_distance < delta}.

    Raises:
        ThresholdExceeded: If |delta| >= 2 r0
    """
    if abs(delta) >= 2.0 * omega.r0:
        raise ThresholdExceeded(delta, 2.0 * omega.r0)
    if omega.shape == "ball":
        R = omega.radius + omega.offset + delta
        if R <= 0:
            raise ThresholdExceeded(delta, omega.radius + omega.offset)
        result = replace(omega, radius=R, offset=0.0, r0=min(omega.r0, R))
    elif delta >= 0 or omega.offset + delta >= 0:
        result = replace(omega, offset=omega.offset + delta,
                         r0=min(omega.r0, min(omega.half_widths) + omega.offset + delta))
    else:
        shrink = omega.offset + delta
        half = tuple(b + shrink for b in omega.half_widths)
        if min(half) <= 0:
            raise ThresholdExceeded(delta, min(omega.half_widths) + omega.offset)
        result = replace(omega, half_widths=half, offset=0.0, r0=min(omega.r0, min(half)))
    logger.debug(f"Eroded {omega.shape} by {delta}: r0 {omega.r0} -> {result.r0}")
    return result


def lipschitz_violation(omega: Domain, samples: int = 2000, seed: int = 0) -> float:
    """Largest |d(x) - d(y)| / |x - y| over random pairs near the domain (<= 1 expected)."""
    rng = np.random.default_rng(seed)
    lo, hi = omega.bounding_box()
    pad = 0.5 * (hi - lo)
    X = rng.uniform(lo - pad, hi + pad, size=(samples, omega.n))
    Y = X + rng.normal(scale=0.1 * float(np.max(hi - lo)), size=X.shape)
    dist = np.linalg.norm(X - Y, axis=-1)
    keep = dist > 0
    ratio = np.abs(signed_distance(omega, X) - signed_distance(omega, Y))[keep] / dist[keep]
    return float(np.max(ratio))


class DomainSet(SetSpec):
    """Omega viewed as a SetSpec (level = signed distance)."""

    def __init__(self, omega: Domain):
        self.omega = omega
        self.dim = omega.n

    def _level(self, X):
        return np.asarray(signed_distance(self.omega, X))

    def bounding_radius(self):
        lo, hi = self.omega.bounding_box()
        return float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))

    def ray_breaks(self, q, D):
        omega = self.omega
        if omega.shape == "ball":
            return Ball(omega.center, omega.radius + omega.offset).ray_breaks(q, D)
        # faces of the (dilated) box; the rounded corners of a dilation stay convex
        faces = []
        for i, half in enumerate(omega.half_widths):
            e = np.eye(omega.n)[i]
            for side in (1.0, -1.0):
                faces.append(HalfSpace(side * e, side * omega.center[i] + half + omega.offset).ray_breaks(q, D))
        return np.concatenate(faces, axis=1)

    def to_dict(self):
        return {"type": "domain", "domain": self.omega.to_dict()}
