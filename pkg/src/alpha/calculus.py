"""
Checks of the alpha calculus at finite s and in the limit.

At finite s monotonicity, additivity, rigid-motion invariance, the
scaling identity

    alpha_s(q, r, lambda E) = lambda^{-s} alpha_s(q / lambda, r / lambda, E)

and the symmetric-difference bound are integral identities, so they are
checked at sampled (q, r, s) directly. Except for rigid motions both
sides are traced with one shared direction rule, so the identities hold
ray by ray up to crossing round-off. The limit relations (complement
duality, stabilization in (q, r), mu_bar = alpha_bar |Omega|) go through
the extrapolation.
"""

import logging
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from src.alpha.alpha import alpha_from_structure, alpha_limit, alpha_rule, alpha_s, alpha_structure
from src.alpha.extrapolation import extrapolate_to_zero
from src.config.settings import get_config
from src.exceptions import HypothesisViolated, InvalidParameter
from src.geometry.domain import Domain
from src.geometry.sets import Complement, Rotate, Scale, SetSpec, Translate, Union, sphere_measure
from src.models import CheckReport

logger = logging.getLogger(__name__)

RELATIONS = ("monotone", "additive", "rigid_motion", "scaling", "symm_diff")

DEFAULT_TOL = {
    "monotone": 1e-6,
    "additive": 1e-4,
    "rigid_motion": 1e-3,
    "scaling": 1e-6,
    "symm_diff": 1e-6,
}


def _random_rotation(rng: np.random.Generator, n: int) -> np.ndarray:
    if n == 1:
        return np.array([[1.0]])
    if n == 2:
        a = rng.uniform(0.0, 2.0 * np.pi)
        return np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
    return Rotation.random(random_state=rng).as_matrix()


def _sampled_inclusion_violation(E: SetSpec, F: SetSpec, rng, count: int = 4000, box: float = 4.0) -> float:
    X = rng.uniform(-box, box, size=(count, E.dim))
    inside_e = E.indicator(X)
    return float(np.mean(inside_e & ~F.indicator(X)))


def alpha_calculus_check(E: SetSpec, F: Optional[SetSpec], relation: str, cfg=None,
                         samples: int = 20, seed: int = 0, tol: Optional[float] = None) -> CheckReport:
    """Evaluate one alpha-calculus relation at sampled (q, r, s).

    Args:
        E: First set
        F: Second set (unused by rigid_motion and scaling)
        relation: One of RELATIONS
        cfg: Full configuration
        samples: Number of sampled (q, r, s)
        seed: RNG seed
        tol: Relative tolerance (per-relation default)

    Returns:
        CheckReport with the largest relative violation
    """
    if relation not in RELATIONS:
        raise InvalidParameter("relation", relation, f"must be one of {RELATIONS}")
    if relation in ("monotone", "additive", "symm_diff") and F is None:
        raise InvalidParameter("F", None, f"relation {relation} needs a second set")
    full = get_config() if cfg is None else cfg
    tol = DEFAULT_TOL[relation] if tol is None else tol
    rng = np.random.default_rng(seed)
    n = E.dim
    details: Dict[str, object] = {"relation": relation, "samples": samples, "seed": seed, "tol": tol}

    if relation == "monotone":
        details["inclusion_violation"] = _sampled_inclusion_violation(E, F, rng)
    if relation == "additive":
        details["overlap"] = _sampled_inclusion_violation(E, Complement(F), rng)

    shared = alpha_rule(E if F is None else Union([E, F]), full)

    def a(S, q, r, s):
        if relation == "rigid_motion":
            return alpha_s(S, q, r, s, full)
        return alpha_from_structure(alpha_structure(S, q, r, full, shared), s)

    worst = 0.0
    rows = []
    for _ in range(samples):
        q = rng.uniform(-1.0, 1.0, size=n)
        r = float(rng.uniform(0.5, 2.0))
        s = float(rng.uniform(0.05, 0.5))
        if relation == "monotone":
            lhs, rhs = a(E, q, r, s), a(F, q, r, s)
            gap = max(lhs - rhs, 0.0)
        elif relation == "additive":
            lhs, rhs = a(Union([E, F]), q, r, s), a(E, q, r, s) + a(F, q, r, s)
            gap = abs(lhs - rhs)
        elif relation == "rigid_motion":
            R = _random_rotation(rng, n)
            v = rng.uniform(-1.0, 1.0, size=n)
            moved = Translate(Rotate(E, R), v)
            lhs, rhs = a(moved, R @ q + v, r, s), a(E, q, r, s)
            gap = abs(lhs - rhs)
        elif relation == "scaling":
            lam = float(rng.uniform(0.5, 4.0))
            lhs = a(Scale(E, lam), q, r, s)
            rhs = lam ** (-s) * a(E, q / lam, r / lam, s)
            gap = abs(lhs - rhs)
        else:
            delta = Union([E - F, F - E])
            lhs, rhs = abs(a(E, q, r, s) - a(F, q, r, s)), a(delta, q, r, s)
            gap = max(lhs - rhs, 0.0)
        rel = gap / (abs(rhs) + 1.0)
        worst = max(worst, rel)
        rows.append((float(s), r, q.tolist(), lhs, rhs))

    details["rows"] = rows
    passed = worst <= tol and details.get("inclusion_violation", 0.0) == 0.0 and details.get("overlap", 0.0) == 0.0
    return CheckReport(f"alpha_calculus[{relation}]", passed, worst, details).log()


def complement_duality_check(E: SetSpec, cfg=None, q=None, r: float = 1.0) -> CheckReport:
    """alpha(E) + alpha(CE) = omega_n within twice the combined error bar."""
    est_e = alpha_limit(E, q, r, cfg)
    est_c = alpha_limit(Complement(E), q, r, cfg)
    omega = sphere_measure(E.dim)
    gap = abs(est_e.extrapolated_limit + est_c.extrapolated_limit - omega)
    allowed = 2.0 * (est_e.error_bar + est_c.error_bar) + 1e-9 * omega
    return CheckReport("complement_duality", gap <= allowed, gap, {
        "alpha": est_e.extrapolated_limit, "alpha_complement": est_c.extrapolated_limit,
        "omega": omega, "allowed": allowed,
    }).log()


def stabilization_check(E: SetSpec, probes: Sequence[Tuple[Sequence[float], float]], cfg=None,
                        s_grid: Optional[Sequence[float]] = None) -> CheckReport:
    """s |alpha_s(q1, r1, E) - alpha_s(q2, r2, E)| along the s-grid for two probes."""
    if len(probes) != 2:
        raise InvalidParameter("probes", len(probes), "need exactly two (q, r) probes")
    full = get_config() if cfg is None else cfg
    grid = list(full.alpha.s_grid if s_grid is None else s_grid)
    (q1, r1), (q2, r2) = probes
    diffs = [s * abs(alpha_s(E, q1, r1, s, full) - alpha_s(E, q2, r2, s, full)) for s in grid]
    limit = full.alpha.stabilization_fraction * sphere_measure(E.dim)
    passed = diffs[-1] < limit and diffs[-1] <= diffs[0] + 1e-12
    return CheckReport("alpha_stabilization", passed, diffs[-1],
                       {"s_grid": grid, "differences": diffs, "limit": limit}).log()


def mu_bar_check(E0: SetSpec, omega: Domain, s_grid: Optional[Sequence[float]] = None, cfg=None,
                 resolution: Optional[int] = None, tol: float = 0.10,
                 energy_fn: Optional[Callable] = None) -> CheckReport:
    """Compare the extrapolated s P_s(E0, Omega) with alpha_bar(E0) |Omega|.

    Raises:
        HypothesisViolated: If sampled points of Omega lie in E0
    """
    from src.minimizer.grid import build_problem, omega_overlap
    from src.minimizer.energy import empty_state_energy

    full = get_config() if cfg is None else cfg
    grid = list(s_grid if s_grid is not None else [0.2, 0.1, 0.05, 0.025])
    overlap = omega_overlap(E0, omega)
    if overlap > 0:
        raise HypothesisViolated(f"{overlap} sampled points of the domain lie in the exterior set")

    energy = energy_fn or empty_state_energy
    scaled = []
    for s in grid:
        problem = build_problem(omega, E0, s, full, resolution=resolution)
        scaled.append(s * energy(problem))
    ext = extrapolate_to_zero(grid, scaled)
    alpha_bar = alpha_limit(E0, cfg=full).extrapolated_limit
    target = alpha_bar * omega.volume()
    rel = abs(ext.limit - target) / max(abs(target), 1e-12) if target else abs(ext.limit)
    return CheckReport("mu_bar", rel <= tol, rel, {
        "s_grid": grid, "scaled_energy": scaled, "extrapolated": ext.limit,
        "alpha_bar": alpha_bar, "volume": omega.volume(), "target": target,
    }).log()
