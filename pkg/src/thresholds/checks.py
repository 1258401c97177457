"""
Uniform positive-curvature check and the sign-change root in s.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from src.config.settings import FracPerimConfig, get_config
from src.curvature.charts import curvature_at
from src.curvature.graph_formula import CurvatureResult
from src.exceptions import InvalidParameter, InvalidWitness, NonConvergence, SameSignBracket, UndefinedRegime
from src.geometry.sets import SetSpec
from src.models import CheckReport
from src.quadrature.pv import PointIntegrator
from src.thresholds.constants import ThresholdSet

logger = logging.getLogger(__name__)

WITNESS_SAMPLES = 4000


def _witness_points(center: np.ndarray, radius: float, count: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    n = center.size
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = radius * (1.0 - 1e-6) * rng.random(count) ** (1.0 / n)
    return center + rad[:, None] * g


def positive_curvature_check(E: SetSpec, q, witness_center, witness_radius: float, alpha_bar: float,
                             s: float, sigma: float, cfg=None) -> CheckReport:
    """liminf_{rho -> 0} I_s^rho[E](q) >= beta / s, with the liminf proxied by the schedule tail.

    Args:
        E: The set
        q: Boundary point where the exterior ball touches
        witness_center: Center of a ball outside E tangent at q
        witness_radius: Its radius, at least delta_sigma
        alpha_bar: Upper contribution from infinity of the exterior data
        s: Fractional order, 0 < s <= sigma
        sigma: Largest order the bound is claimed for
        cfg: Full configuration

    Returns:
        CheckReport with the smallest tail value against beta / s

    Raises:
        UndefinedRegime: If alpha_bar >= omega_n / 2
        InvalidWitness: If the ball meets E, is not tangent at q, or is too small
        InvalidParameter: If not 0 < s <= sigma < 1
    """
    full = get_config() if cfg is None else cfg
    q = np.asarray(q, dtype=float)
    c = np.asarray(witness_center, dtype=float)
    ts = ThresholdSet(E.dim, alpha_bar)
    if not ts.in_regime:
        raise UndefinedRegime(alpha_bar, 0.5 * ts.omega_n)
    if not 0.0 < s <= sigma < 1.0:
        raise InvalidParameter("s", s, f"need 0 < s <= sigma={sigma} < 1")
    delta_sigma = ts.delta_of_s(sigma)
    if witness_radius < delta_sigma:
        raise InvalidWitness(f"radius {witness_radius:g} below delta_sigma = {delta_sigma:.6g}")
    gap = abs(float(np.linalg.norm(q - c)) - witness_radius)
    if gap > 1e-9 * (1.0 + witness_radius):
        raise InvalidWitness(f"ball is not tangent at q (distance gap {gap:.3g})")
    hits = int(np.sum(E.indicator(_witness_points(c, witness_radius, WITNESS_SAMPLES))))
    if hits:
        raise InvalidWitness(f"{hits} sampled points of the ball lie in E")

    qc = full.quadrature
    schedule = qc.rho_schedule(1.0)
    integrator = PointIntegrator(E, q, full, t_start=min(schedule))
    values = [integrator.truncated(s, rho) for rho in schedule]
    levels = max(1, full.thresholds.liminf_levels)
    proxy = min(values[-levels:])
    bound = ts.beta / s
    tol = qc.rel_tol * (abs(bound) + 1.0) + integrator.fine.far_error(s)
    passed = proxy >= bound - tol
    return CheckReport("positive_curvature", passed, max(bound - proxy, 0.0), {
        "s": s, "sigma": sigma, "beta": ts.beta, "bound": bound, "delta_sigma": delta_sigma,
        "schedule": list(schedule), "values": values, "liminf_proxy": proxy, "tolerance": tol,
    }).log()


@dataclass
class RootResult:
    s_root: float
    width: float
    value: float
    error_estimate: float
    f_lo: float
    f_hi: float
    iterations: int
    degenerate: bool = False
    retried: bool = False
    bracket: Tuple[float, float] = (0.0, 0.0)
    converged: bool = True
    error: Optional[str] = None

    def to_dict(self):
        return asdict(self)


def widened_config(cfg: FracPerimConfig) -> FracPerimConfig:
    """Copy of cfg with finer quadrature for one retry."""
    wide = FracPerimConfig.from_dict(cfg.to_dict())
    wide.quadrature.rho_levels += 4
    wide.quadrature.angular_order *= 2
    wide.quadrature.samples_per_decade *= 2
    wide.curvature.radial_order += 4
    wide.curvature.tail_order += 4
    wide.curvature.tail_panels *= 2
    return wide


def sign_change_root(E: SetSpec, p, s_bracket: Sequence[float], cfg=None,
                     tol_s: Optional[float] = None) -> RootResult:
    """Root s~ of s -> I_s[E](p) inside a sign-changing bracket.

    Bisection narrows the bracket to tol_s; a Brent step inside the final
    bracket then pins the root itself. A non-converged evaluation triggers
    one retry of the whole search with widened quadrature; if that fails
    too, the narrowest bracket reached comes back with converged=False and
    the NonConvergence message in `error`.

    Raises:
        SameSignBracket: If the endpoint values have the same sign
        InvalidParameter: If the bracket is not inside (0, 1)
    """
    full = get_config() if cfg is None else cfg
    lo, hi = float(s_bracket[0]), float(s_bracket[1])
    if not 0.0 < lo < hi < 1.0:
        raise InvalidParameter("s_bracket", (lo, hi), "need 0 < lo < hi < 1")
    tol = full.thresholds.tol_s if tol_s is None else float(tol_s)
    p = np.asarray(p, dtype=float)

    result = _bisect(E, p, lo, hi, tol, full)
    if not result.converged:
        logger.warning(f"{result.error}; retrying with finer quadrature")
        result = _bisect(E, p, lo, hi, tol, widened_config(full))
        result.retried = True
        if not result.converged:
            logger.warning(f"{result.error}; returning the bracket [{result.bracket[0]:.6g}, "
                           f"{result.bracket[1]:.6g}]")
    return result


def _unsettled(a: float, b: float, r: CurvatureResult, r_lo: CurvatureResult, r_hi: CurvatureResult,
               iterations: int) -> RootResult:
    """Best bracket so far when the curvature at r.s does not converge."""
    error = NonConvergence("root search", f"I_s at s={r.s:.6g} did not converge")
    return RootResult(0.5 * (a + b), b - a, r.value, r.error_estimate, r_lo.value, r_hi.value,
                      iterations, bracket=(a, b), converged=False, error=error.message)


def _bisect(E: SetSpec, p: np.ndarray, lo: float, hi: float, tol: float, cfg) -> RootResult:
    evaluations = {}

    def f(s: float) -> CurvatureResult:
        if s not in evaluations:
            evaluations[s] = curvature_at(E, p, s, cfg)
        return evaluations[s]

    r_lo, r_hi, r_mid = f(lo), f(hi), f(0.5 * (lo + hi))
    for r in (r_lo, r_hi, r_mid):
        if not r.converged:
            return _unsettled(lo, hi, r, r_lo, r_hi, 0)
    flat = all(abs(r.value) <= 10.0 * r.error_estimate + 1e-12 for r in (r_lo, r_mid, r_hi))
    if flat:
        logger.warning(f"I_s[E]({p.tolist()}) vanishes on the whole bracket; every s is a root")
        return RootResult(float("nan"), hi - lo, 0.0, max(r.error_estimate for r in (r_lo, r_hi)),
                          r_lo.value, r_hi.value, 0, degenerate=True, bracket=(lo, hi))
    if np.sign(r_lo.value) == np.sign(r_hi.value):
        raise SameSignBracket(lo, hi, r_lo.value, r_hi.value)

    a, b, fa = lo, hi, r_lo.value
    iterations = 0
    while b - a > tol:
        mid = 0.5 * (a + b)
        r = f(mid)
        iterations += 1
        if not r.converged:
            return _unsettled(a, b, r, r_lo, r_hi, iterations)
        if r.value == 0.0:
            a = b = mid
            break
        if np.sign(r.value) == np.sign(fa):
            a, fa = mid, r.value
        else:
            b = mid
    width = b - a

    root = 0.5 * (a + b)
    if width > 0.0:
        try:
            root = optimize.brentq(lambda s: f(s).value, a, b, xtol=1e-12, maxiter=50)
        except (ValueError, RuntimeError) as e:
            logger.info(f"Brent polish skipped: {e}")
    final = f(root)
    logger.info(f"Sign change of I_s at s~={root:.6f} (bracket width {width:.2g}, {iterations} bisections)")
    return RootResult(float(root), width, final.value, final.error_estimate, r_lo.value, r_hi.value,
                      iterations, bracket=(a, b))
