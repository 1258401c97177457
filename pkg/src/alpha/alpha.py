"""
The contribution from infinity.

    alpha_s(q, r, E) = int_{C B_r(q)} chi_E(y) |y - q|^{-n-s} dy
    alpha(E)         = lim_{s -> 0+} s alpha_s(q, r, E)

alpha_s is computed in closed form for the tail families of tail.py and
otherwise from the signed ray structure:

    alpha_s = (omega_n r^{-s} / s - signed tail) / 2

The structure does not depend on s, so a whole s-grid costs one trace.
Limits are extrapolated linearly in s and compared with the closed forms
routed by the growth tags of supergraphs.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from src.alpha.extrapolation import extrapolate_to_zero
from src.config.settings import get_config
from src.exceptions import InvalidParameter
from src.geometry.catalog import cubic_cone_bounds, parabola_cone_opening
from src.geometry.sets import (
    Complement, EmptySet, FullSet, HalfSpace, Intersection, Rotate, Scale, SetSpec, SphericalCone,
    Supergraph, Translate, Union, sphere_measure,
)
from src.quadrature.directions import DirectionRule, uniform_rule
from src.quadrature.rays import RayStructure, trace_rays
from src.quadrature.tail import closed_form_tail

logger = logging.getLogger(__name__)

FLAT_GROWTH = ("bounded", "sublinear", "cubic_like")
CONE_BOUND_RADIUS = 100.0


@dataclass
class AlphaEstimate:
    s_grid: List[float]
    alpha_values: List[float]
    scaled_values: List[float]
    extrapolated_limit: float
    error_bar: float
    limsup_liminf_split: Optional[Tuple[float, float]] = None
    closed_form: Optional[float] = None
    family: Optional[str] = None
    bounds: Optional[Tuple[float, float]] = None
    extrapolants: List[float] = field(default_factory=list)
    q: List[float] = field(default_factory=list)
    r: float = 1.0

    @property
    def oscillating(self) -> bool:
        return self.limsup_liminf_split is not None

    def closed_form_gap(self) -> Optional[float]:
        if self.closed_form is None:
            return None
        return abs(self.extrapolated_limit - self.closed_form)

    def agrees(self, tol: float) -> bool:
        """Limit within error_bar + tol of the closed form (True when there is none)."""
        gap = self.closed_form_gap()
        return gap is None or gap <= self.error_bar + tol

    def csv_rows(self) -> List[Tuple[float, float, float, Any]]:
        cf = "" if self.closed_form is None else self.closed_form
        return [(s, a, v, cf) for s, a, v in zip(self.s_grid, self.alpha_values, self.scaled_values)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s_grid": list(self.s_grid),
            "alpha_values": list(self.alpha_values),
            "scaled_values": list(self.scaled_values),
            "extrapolated_limit": self.extrapolated_limit,
            "error_bar": self.error_bar,
            "limsup_liminf_split": self.limsup_liminf_split,
            "closed_form": self.closed_form,
            "family": self.family,
            "bounds": self.bounds,
            "extrapolants": list(self.extrapolants),
            "q": list(self.q),
            "r": self.r,
        }


# ========== Direction rules ==========

def _kink_breaks(E: SetSpec) -> Tuple[List[float], List[float]]:
    """(angle breaks, z breaks) where the far-field membership of E jumps."""
    if isinstance(E, (Complement, Translate)):
        return _kink_breaks(E.inner)
    if isinstance(E, (Union, Intersection)):
        angles, zs = [], []
        for part in E.parts:
            a, z = _kink_breaks(part)
            angles += a
            zs += z
        return angles, zs
    if isinstance(E, SphericalCone):
        if E.intervals is not None:
            angles = [E.intervals[0][0], E.intervals[0][1]]
            zs = [abs(float(np.cos(t))) for t in E.intervals[1]] if E.dim == 3 else []
            return angles, zs
        if E.dim == 2:
            base = float(np.arctan2(E.axis[1], E.axis[0]))
            return [base - E.half_angle, base + E.half_angle], []
        if E.dim == 3 and np.allclose(np.abs(E.axis), [0.0, 0.0, 1.0]):
            return [], [abs(float(np.cos(E.half_angle)))]
        return [], []
    if isinstance(E, HalfSpace) and E.dim == 2:
        nu = E.normal_vector
        return [float(np.arctan2(nu[0], -nu[1]))], []
    if isinstance(E, Supergraph) and E.graph.family == "linear_cone" and E.dim == 3:
        k = float(E.graph.params["k"])
        cone = E.graph.params["cone"]
        angles = list(cone["intervals"][0]) if "intervals" in cone else []
        return angles, [k / np.sqrt(1.0 + k * k)]
    return [], []


def alpha_rule(E: SetSpec, cfg=None) -> DirectionRule:
    """Uniform direction rule with breakpoints at the far-field kinks of E."""
    ac = (get_config() if cfg is None else cfg).alpha
    angles, zs = _kink_breaks(E)
    return uniform_rule(E.dim, panels=ac.angular_panels, order=ac.angular_order,
                        polar_panels=ac.polar_panels, polar_order=ac.polar_order,
                        azimuth_nodes=ac.azimuth_nodes, angle_breaks=angles, z_breaks=zs)


def alpha_structure(E: SetSpec, q, r: float, cfg=None, rule: Optional[DirectionRule] = None) -> RayStructure:
    """Rays from q on [r, far_radius * r] (the rule defaults to alpha_rule(E))."""
    full = get_config() if cfg is None else cfg
    qc = full.quadrature
    rule = alpha_rule(E, full) if rule is None else rule
    return trace_rays(E, np.asarray(q, dtype=float), rule, r, r * qc.far_radius,
                      samples_per_decade=qc.samples_per_decade,
                      iterations=qc.crossing_iterations, chunk=qc.chunk_rays)


def alpha_from_structure(structure: RayStructure, s: float) -> float:
    r = float(structure.t_start[0])
    omega_tail = structure.total_weight() * r ** (-s) / s
    return max(0.5 * (omega_tail - structure.integral(s)), 0.0)


# ========== alpha_s ==========

def _check(r: float, s: float) -> None:
    if r <= 0:
        raise InvalidParameter("r", r, "must be positive")
    if not 0.0 < s < 1.0:
        raise InvalidParameter("s", s, "must lie in (0, 1)")


def alpha_s(E: SetSpec, q, r: float, s: float, cfg=None) -> float:
    """alpha_s(q, r, E) >= 0.

    Args:
        E: The set
        q: Center of the excluded ball
        r: Radius of the excluded ball
        s: Fractional order in (0, 1)
        cfg: Full configuration (defaults to get_config())

    Returns:
        The weighted measure of E outside B_r(q)

    Raises:
        InvalidParameter: If r <= 0 or s is outside (0, 1)
        UnclassifiedSet: If no closed form applies and the ray integral fails
    """
    _check(r, s)
    q = np.asarray(q, dtype=float)
    closed = closed_form_tail(E, q, r, s, signed=False)
    if closed is not None:
        return float(closed[0])
    return alpha_from_structure(alpha_structure(E, q, r, cfg), s)


# ========== Closed forms ==========

def _linear_cone_alpha(n: int, k: float, cap: float) -> float:
    inner, _ = integrate.quad(lambda t: (1.0 + t * t) ** (-0.5 * n), 0.0, k)
    return 0.5 * sphere_measure(n) - cap * inner


def _is_strip(parts: Sequence[SetSpec]) -> bool:
    """Region between a supergraph and a subgraph of flat growth."""
    above = below = False
    for part in parts:
        if isinstance(part, Supergraph) and part.graph.growth_tag.kind in FLAT_GROWTH:
            above = True
        if (isinstance(part, Complement) and isinstance(part.inner, Supergraph)
                and part.inner.graph.growth_tag.kind in FLAT_GROWTH):
            below = True
    return above and below


def closed_form_alpha(E: SetSpec) -> Optional[Tuple[float, str]]:
    """alpha(E) for the families with a known value, else None.

    A superlinear supergraph {x_n >= u} has alpha 0 when u grows to +inf
    (the set thins out to a cusp) and omega_n when u falls to -inf; the
    tag's `sign` (default +1) tells the two apart.
    """
    n = E.dim
    omega = sphere_measure(n)
    if isinstance(E, EmptySet):
        return 0.0, "empty"
    if isinstance(E, FullSet):
        return omega, "full"
    if isinstance(E, HalfSpace):
        return 0.5 * omega, "halfspace"
    if isinstance(E, SphericalCone):
        return E.cap_measure(), "cone"
    b = E.bounding_radius()
    if b is not None and np.isfinite(b):
        return 0.0, "bounded"
    if isinstance(E, (Translate, Rotate, Scale)):
        return closed_form_alpha(E.inner)
    if isinstance(E, Complement):
        inner = closed_form_alpha(E.inner)
        if inner is None:
            return None
        return omega - inner[0], f"complement({inner[1]})"
    if isinstance(E, Supergraph):
        tag = E.graph.growth_tag
        if tag.kind in FLAT_GROWTH:
            return 0.5 * omega, tag.kind
        if tag.kind == "superlinear":
            return (0.0 if tag.get("sign", 1.0) > 0 else omega), tag.kind
        if tag.kind == "linear_cone":
            return _linear_cone_alpha(n, tag.get("k"), tag.get("cap_measure")), tag.kind
        return None
    if isinstance(E, Intersection):
        if _is_strip(E.parts):
            return 0.0, "strip"
        for part in E.parts:
            sub = closed_form_alpha(part)
            if sub is not None and sub[0] == 0.0:
                return 0.0, f"subset({sub[1]})"
        return None
    if isinstance(E, Union):
        subs = [closed_form_alpha(part) for part in E.parts]
        if all(sub is not None and sub[0] == 0.0 for sub in subs):
            return 0.0, "union_of_null"
    return None


def cone_bounds(E: SetSpec) -> Optional[Tuple[float, float]]:
    """Enclosing-cone bracket of alpha for the parabola and x^3 supergraphs."""
    if not isinstance(E, Supergraph):
        return None
    if E.graph.family == "parabola" and float(E.graph.params.get("c", 1.0)) == 1.0:
        return 0.0, parabola_cone_opening(CONE_BOUND_RADIUS, E.dim)
    if E.graph.family == "cubic" and E.dim == 2:
        return cubic_cone_bounds(CONE_BOUND_RADIUS)
    return None


# ========== alpha(E) ==========

def alpha_limit(E: SetSpec, q=None, r: float = 1.0, cfg=None,
                s_grid: Optional[Sequence[float]] = None) -> AlphaEstimate:
    """Extrapolate s alpha_s(q, r, E) to s = 0.

    Args:
        E: The set
        q: Center (defaults to the origin)
        r: Radius of the excluded ball
        cfg: Full configuration
        s_grid: Decreasing s values (defaults to cfg.alpha.s_grid)

    Returns:
        AlphaEstimate with the scan, the extrapolated limit and the closed
        form when the set belongs to a known family
    """
    full = get_config() if cfg is None else cfg
    grid = list(full.alpha.s_grid if s_grid is None else s_grid)
    q = np.zeros(E.dim) if q is None else np.asarray(q, dtype=float)
    for s in grid:
        _check(r, s)
    omega = sphere_measure(E.dim)

    if closed_form_tail(E, q, r, grid[0], signed=False) is not None:
        alphas = [alpha_s(E, q, r, s, full) for s in grid]
    else:
        structure = alpha_structure(E, q, r, full)
        alphas = [alpha_from_structure(structure, s) for s in grid]
    scaled = [s * a for s, a in zip(grid, alphas)]

    ext = extrapolate_to_zero(grid, scaled, full.alpha.oscillation_tol * omega)
    closed = closed_form_alpha(E)
    estimate = AlphaEstimate(
        s_grid=grid,
        alpha_values=alphas,
        scaled_values=scaled,
        extrapolated_limit=ext.limit,
        error_bar=ext.error_bar,
        limsup_liminf_split=ext.split,
        closed_form=None if closed is None else closed[0],
        family=None if closed is None else closed[1],
        bounds=cone_bounds(E),
        extrapolants=list(ext.extrapolants),
        q=q.tolist(),
        r=r,
    )
    if not -estimate.error_bar - 1e-9 <= estimate.extrapolated_limit <= omega + estimate.error_bar + 1e-9:
        logger.warning(f"Extrapolated alpha {estimate.extrapolated_limit:.6g} outside [0, {omega:.6g}]")
    logger.debug(f"alpha_limit: L={ext.limit:.6g} +- {ext.error_bar:.2g}, closed form={estimate.closed_form}")
    return estimate
