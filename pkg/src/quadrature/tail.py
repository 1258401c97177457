"""
Integrals over the complement of a ball B_R(q).

    signed:   int_{C B_R(q)} (chi_{CE} - chi_E)(y) |y - q|^{-n-s} dy
    unsigned: int_{C B_R(q)} chi_E(y) |y - q|^{-n-s} dy

Closed forms cover the empty and full sets, half-spaces (through q or
offset), cones apexed at q, complements of those and bounded sets that
lie inside B_R(q). Everything else is integrated along rays from t = R.
"""

import logging
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy import integrate

from src.config.settings import get_config
from src.exceptions import InvalidParameter, UnclassifiedSet
from src.geometry.sets import (
    Complement, EmptySet, FullSet, HalfSpace, SetSpec, SphericalCone, sphere_measure,
    spherical_cap_measure,
)
from src.quadrature.directions import uniform_rule
from src.quadrature.rays import trace_rays

logger = logging.getLogger(__name__)


class TailResult(NamedTuple):
    value: float
    error: float
    method: str


def _offset_halfspace_unsigned(H: HalfSpace, q: np.ndarray, R: float, s: float) -> float:
    n = H.dim
    omega = sphere_measure(n)
    d = H.offset - float(q @ H.normal_vector)

    def excess(x):
        # measure of directions hitting H at radius R/x, minus half the sphere
        c = np.clip(d * x / R, -1.0, 1.0)
        return spherical_cap_measure(n, float(np.arccos(c))) - 0.5 * omega

    if d == 0.0:
        return 0.5 * omega * R ** (-s) / s
    knot = min(1.0, R / abs(d))
    body, _ = integrate.quad(lambda x: excess(x) * x ** (s - 1.0), 0.0, knot, limit=200)
    rest = 0.0
    if knot < 1.0:
        rest = (omega if d < 0 else 0.0) - 0.5 * omega
        rest *= (1.0 - knot ** s) / s
    return 0.5 * omega * R ** (-s) / s + R ** (-s) * (body + rest)


def closed_form_tail(E: SetSpec, q, R: float, s: float, signed: bool) -> Optional[Tuple[float, str]]:
    """Exact tail when E belongs to a family with a closed form, else None."""
    q = np.asarray(q, dtype=float)
    n = E.dim
    omega = sphere_measure(n)
    full = omega * R ** (-s) / s

    def result(unsigned: float, method: str) -> Tuple[float, str]:
        return (full - 2.0 * unsigned if signed else unsigned), method

    if isinstance(E, EmptySet):
        return result(0.0, "empty")
    if isinstance(E, FullSet):
        return result(full, "full")
    if isinstance(E, HalfSpace):
        if E.passes_through(q):
            return (0.0, "halfspace") if signed else (0.5 * full, "halfspace")
        return result(_offset_halfspace_unsigned(E, q, R, s), "halfspace_offset")
    if isinstance(E, SphericalCone) and np.allclose(E.apex, q, atol=1e-14):
        return result(E.cap_measure() * R ** (-s) / s, "cone")
    if isinstance(E, Complement):
        inner = closed_form_tail(E.inner, q, R, s, signed)
        if inner is None:
            return None
        value, method = inner
        return (-value if signed else full - value), f"complement({method})"
    b = E.bounding_radius()
    if b is not None and np.isfinite(b) and float(np.linalg.norm(q)) + b <= R:
        return result(0.0, "bounded")
    return None


def tail_estimate(E: SetSpec, q, R: float, s: float, signed: bool = True, cfg=None) -> TailResult:
    """Tail value, error bound and the method used.

    Raises:
        InvalidParameter: If R <= 0 or s outside (0, 1]
        UnclassifiedSet: If the numeric scheme produces a non-finite value
    """
    if R <= 0:
        raise InvalidParameter("R", R, "must be positive")
    if not 0.0 < s <= 1.0:
        raise InvalidParameter("s", s, "must lie in (0, 1]")
    closed = closed_form_tail(E, q, R, s, signed)
    if closed is not None:
        return TailResult(closed[0], 0.0, closed[1])

    full = get_config() if cfg is None else cfg
    qc = full.quadrature
    ac = full.alpha
    rule = uniform_rule(E.dim, panels=ac.angular_panels, order=ac.angular_order,
                        polar_panels=ac.polar_panels, polar_order=ac.polar_order,
                        azimuth_nodes=ac.azimuth_nodes)
    rays = trace_rays(E, np.asarray(q, dtype=float), rule, R, R * qc.far_radius,
                      samples_per_decade=qc.samples_per_decade,
                      iterations=qc.crossing_iterations, chunk=qc.chunk_rays)
    signed_value = rays.integral(s)
    error = rays.far_error(s)
    if not np.isfinite(signed_value):
        raise UnclassifiedSet("numeric tail integral is not finite")
    if signed:
        return TailResult(signed_value, error, "rays")
    omega_tail = sphere_measure(E.dim) * R ** (-s) / s
    return TailResult(0.5 * (omega_tail - signed_value), 0.5 * error, "rays")


def tail_integral(E: SetSpec, q, R: float, s: float, signed: bool = True, cfg=None) -> float:
    """Integral over the complement of B_R(q); see tail_estimate."""
    return tail_estimate(E, q, R, s, signed, cfg).value
