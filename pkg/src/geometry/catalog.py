"""
Catalog of named example sets.

`canonical_set(name, n=..., **params)` builds the worked examples used
throughout the library: cones, half-spaces, balls, the supergraphs of
x^3 / |x'|^2 / tanh / sublinear graphs, the butterscotch candy, the
sigma-set over a linear cone, and the delta-dense sets Gamma_k^eps.
"""

import logging
from typing import Callable, Dict, Tuple

import numpy as np
from scipy import optimize

from src.exceptions import InvalidParameter, UnknownSetFamily
from src.geometry.graphs import (
    cubic_graph, linear_cone_graph, parabola_graph, sublinear_graph, tanh_graph,
)
from src.geometry.sets import (
    Ball, Complement, HalfSpace, Intersection, SetSpec, SphericalCone, Supergraph, Union,
    sphere_measure,
)

logger = logging.getLogger(__name__)


def _unit(n: int, i: int) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


def _halfspace(n: int = 2, normal=None, offset: float = 0.0) -> SetSpec:
    return HalfSpace(_unit(n, n - 1) if normal is None else normal, offset)


def _quadrant(n: int = 2) -> SetSpec:
    if n == 2:
        return SphericalCone(np.zeros(2), intervals=((0.0, np.pi / 2.0),))
    if n == 3:
        return SphericalCone(np.zeros(3), intervals=((0.0, np.pi / 2.0), (0.0, np.pi / 2.0)))
    raise InvalidParameter("n", n, "quadrant is defined for n = 2 and n = 3")


def _cone(n: int = 2, opening: float = None, half_angle: float = None, axis=None, apex=None) -> SetSpec:
    """Cone with the given opening (n = 2, around e_2) or half-angle around axis."""
    apex = np.zeros(n) if apex is None else np.asarray(apex, dtype=float)
    if n == 2 and opening is not None:
        if not 0.0 < opening < 2.0 * np.pi:
            raise InvalidParameter("opening", opening, "must lie in (0, 2 pi)")
        mid = np.pi / 2.0
        return SphericalCone(apex, intervals=((mid - opening / 2.0, mid + opening / 2.0),))
    if half_angle is None:
        raise InvalidParameter("half_angle", None, "give opening (n = 2) or half_angle")
    if not 0.0 < half_angle < np.pi:
        raise InvalidParameter("half_angle", half_angle, "must lie in (0, pi)")
    return SphericalCone(apex, axis=_unit(n, n - 1) if axis is None else axis, half_angle=half_angle)


def _ball(n: int = 2, center=None, radius: float = 1.0) -> SetSpec:
    return Ball(np.zeros(n) if center is None else center, radius)


def _annulus(n: int = 2, inner: float = 1.0, outer: float = 2.0) -> SetSpec:
    if not 0.0 < inner < outer:
        raise InvalidParameter("inner", inner, "need 0 < inner < outer")
    return Intersection([Ball(np.zeros(n), outer), Complement(Ball(np.zeros(n), inner))])


def _cubic_supergraph(n: int = 2) -> SetSpec:
    return Supergraph(cubic_graph(n - 1))


def _parabola_supergraph(n: int = 2, c: float = 1.0) -> SetSpec:
    if c <= 0:
        raise InvalidParameter("c", c, "must be positive")
    return Supergraph(parabola_graph(n - 1, c))


def _tanh_supergraph(n: int = 2) -> SetSpec:
    return Supergraph(tanh_graph(n - 1))


def _sublinear_supergraph(n: int = 2, c: float = 1.0, eps: float = 0.5) -> SetSpec:
    return Supergraph(sublinear_graph(n - 1, c, eps))


def _butterscotch_candy(n: int = 2, c: float = 1.0, eps: float = 0.5) -> SetSpec:
    """{|x_n| < c (1 + |x'|^2)^{(1-eps)/2}}."""
    if c <= 0:
        raise InvalidParameter("c", c, "must be positive")
    upper = sublinear_graph(n - 1, c, eps)
    lower = sublinear_graph(n - 1, -c, eps)
    return Intersection([Supergraph(lower), Complement(Supergraph(upper))])


def _sigma_supergraph(n: int = 3, k: float = 1.0, azimuth: Tuple[float, float] = (0.0, np.pi / 2.0),
                      x0=None) -> SetSpec:
    """Supergraph of u = k|x' - x0'| on the cone X over the azimuth interval, u = 0 elsewhere."""
    if n == 3:
        cone = SphericalCone(np.zeros(2), intervals=(tuple(azimuth),))
    elif n == 2:
        cone = SphericalCone(np.zeros(1), intervals=(tuple(azimuth),))
    else:
        raise InvalidParameter("n", n, "sigma supergraph is defined for n = 2 and n = 3")
    return Supergraph(linear_cone_graph(n - 1, k, cone, x0))


def _gamma_k_eps(n: int = 2, k: int = 2, eps: float = 0.05) -> SetSpec:
    """B_eps together with the shells i/2^k - eps < |x| < i/2^k + eps, i = 1..2^k."""
    if int(k) != k or k < 1:
        raise InvalidParameter("k", k, "must be an integer >= 1")
    if not 0.0 < eps < 2.0 ** (-k - 1):
        raise InvalidParameter("eps", eps, f"must lie in (0, 2^-{k + 1})")
    origin = np.zeros(n)
    parts = [Ball(origin, eps)]
    for i in range(1, 2 ** int(k) + 1):
        r = i / 2.0 ** k
        parts.append(Intersection([Ball(origin, r + eps), Complement(Ball(origin, r - eps))]))
    return Union(parts)


def _dimpled_quadrant(n: int = 2, center=(2.0, 0.0), radius: float = 0.5) -> SetSpec:
    """Quadrant with a round dimple cut out of its lower edge."""
    if n != 2:
        raise InvalidParameter("n", n, "dimpled quadrant is planar")
    return Intersection([_quadrant(2), Complement(Ball(center, radius))])


CANONICAL_SETS: Dict[str, Callable[..., SetSpec]] = {
    "halfspace": _halfspace,
    "quadrant": _quadrant,
    "cone": _cone,
    "ball": _ball,
    "annulus": _annulus,
    "cubic_supergraph": _cubic_supergraph,
    "parabola_supergraph": _parabola_supergraph,
    "tanh_supergraph": _tanh_supergraph,
    "sublinear_supergraph": _sublinear_supergraph,
    "butterscotch_candy": _butterscotch_candy,
    "sigma_supergraph": _sigma_supergraph,
    "gamma_k_eps": _gamma_k_eps,
    "dimpled_quadrant": _dimpled_quadrant,
}


def canonical_set(name: str, **params) -> SetSpec:
    """Build a named example set.

    Args:
        name: One of CANONICAL_SETS
        **params: Family parameters (always accepts `n`)

    Returns:
        The SetSpec

    Raises:
        UnknownSetFamily: If name is not in the catalog
        InvalidParameter: If parameters are out of range
    """
    if name not in CANONICAL_SETS:
        raise UnknownSetFamily(name)
    try:
        return CANONICAL_SETS[name](**params)
    except TypeError as e:
        raise InvalidParameter(name, params, str(e))


def gamma_measure_in_unit_ball(n: int, k: int, eps: float) -> float:
    """|Gamma_k^eps intersected with B_1|."""
    vol = sphere_measure(n) / n

    def ball(r):
        return vol * max(r, 0.0) ** n

    total = ball(eps)
    for i in range(1, 2 ** int(k) + 1):
        r = i / 2.0 ** k
        total += ball(min(r + eps, 1.0)) - ball(r - eps)
    return total


def parabola_cone_opening(R: float, n: int = 2) -> float:
    """Opening of the cone through the points where the parabola x_n = |x'|^2 meets dB_R."""
    if R <= 0:
        raise InvalidParameter("R", R, "must be positive")
    ratio = np.sqrt(np.sqrt(4.0 * R * R + 1.0) - 1.0) / (R * np.sqrt(2.0))
    return float(np.arcsin(np.clip(ratio, 0.0, 1.0)) * sphere_measure(n) / np.pi)


def cubic_cone_bounds(R: float) -> Tuple[float, float]:
    """Openings bracketing the x^3 supergraph outside B_R: (pi - asin(x_R/R), pi + asin(x_R/R)).

    x_R > 0 solves x^6 + x^2 = R^2.
    """
    if R <= 0:
        raise InvalidParameter("R", R, "must be positive")
    x_R = optimize.brentq(lambda x: x ** 6 + x ** 2 - R * R, 0.0, max(R, 1.0))
    spread = float(np.arcsin(min(x_R / R, 1.0)))
    return np.pi - spread, np.pi + spread
