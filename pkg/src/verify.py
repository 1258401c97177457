"""
Acceptance suite behind the `verify` command.

Each criterion is a small experiment with a fixed target; it returns its
measured value, the target and a pass/fail verdict. Slow criteria (the
64x64 sweep and the mu_bar extrapolation) can be skipped.
"""

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.alpha.alpha import alpha_limit, alpha_s
from src.alpha.calculus import alpha_calculus_check, complement_duality_check, mu_bar_check
from src.config.settings import FracPerimConfig, get_config
from src.curvature.charts import curvature_at
from src.curvature.scans import curvature_scan
from src.exceptions import FracPerimException
from src.geometry.catalog import canonical_set
from src.geometry.domain import Domain
from src.geometry.sets import Ball, EmptySet, HalfSpace, sphere_measure
from src.minimizer.checks import density_estimate_check, maximum_principle_check
from src.minimizer.energy import apply_flip, discrete_perimeter
from src.minimizer.grid import build_layout, build_problem, problem_from_layout
from src.minimizer.solvers import MinimizeResult, anneal, exhaustive
from src.minimizer.sweep import stickiness_sweep
from src.thresholds.checks import sign_change_root
from src.thresholds.constants import delta_s

logger = logging.getLogger(__name__)

Measured = Tuple[bool, float, float, Dict[str, Any]]

SMALL_S = 0.0125
ODD_SYMMETRY_S = (0.1, 0.3, 0.5, 0.7, 0.9)
CLASSICAL_S = (0.75, 0.8, 0.85, 0.9, 0.95)
STICKINESS_S = (0.4, 0.2, 0.1, 0.05)
DELTA_S = (0.1, 0.25, 0.5, 0.75, 0.9)
ORACLE_RESTARTS = 8
ORACLE_AGREEING = 7


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    value: float
    target: float
    seconds: float
    details: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None

    HEADER = ("criterion", "name", "passed", "value", "target", "seconds")

    def row(self) -> tuple:
        return (self.number, self.name, self.passed, self.value, self.target, round(self.seconds, 3))

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] {self.number:2d} {self.name}: {self.value:.6g} (target {self.target:.6g})"

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class Criterion(NamedTuple):
    number: int
    name: str
    measure: Callable[[FracPerimConfig], Measured]
    slow: bool = False


def _rel(value: float, target: float) -> float:
    return abs(value - target) / abs(target)


# ========== alpha ==========

def cone_alpha(cfg) -> Measured:
    E = canonical_set("quadrant", n=2)
    target = np.pi / 2.0
    scaled = SMALL_S * alpha_s(E, (0.5, 0.25), 1.0, SMALL_S, cfg)
    limit = alpha_limit(E, cfg=cfg).extrapolated_limit
    passed = _rel(scaled, target) <= 0.02 and _rel(limit, target) <= 0.01
    return passed, limit, target, {"s_alpha_s": scaled, "s": SMALL_S}


def _alpha_family(name: str, target: float, cfg, **params) -> Measured:
    est = alpha_limit(canonical_set(name, **params), cfg=cfg)
    passed = _rel(est.extrapolated_limit, target) <= cfg.alpha.acceptance_tol
    return passed, est.extrapolated_limit, target, {
        "error_bar": est.error_bar, "scaled_values": est.scaled_values}


def cubic_alpha(cfg) -> Measured:
    return _alpha_family("cubic_supergraph", np.pi, cfg)


def parabola_alpha(cfg) -> Measured:
    est = alpha_limit(canonical_set("parabola_supergraph"), cfg=cfg)
    scaled = est.scaled_values
    decreasing = all(b <= a + 1e-12 for a, b in zip(scaled, scaled[1:]))
    cap = 0.05 * sphere_measure(2)
    return decreasing and scaled[-1] < cap, scaled[-1], 0.0, {"scaled_values": scaled, "cap": cap,
                                                              "decreasing": decreasing}


def tanh_alpha(cfg) -> Measured:
    return _alpha_family("tanh_supergraph", np.pi, cfg)


def sigma_alpha(cfg) -> Measured:
    est = alpha_limit(canonical_set("sigma_supergraph", n=3, k=1.0), cfg=cfg)
    if est.closed_form is None:
        return False, est.extrapolated_limit, float("nan"), {"reason": "no closed form"}
    passed = _rel(est.extrapolated_limit, est.closed_form) <= cfg.alpha.acceptance_tol
    return passed, est.extrapolated_limit, est.closed_form, {"error_bar": est.error_bar}


# ========== curvature ==========

def small_s_curvature(cfg) -> Measured:
    ball = curvature_at(canonical_set("ball"), (1.0, 0.0), SMALL_S, cfg).scaled_s0
    quadrant = curvature_at(canonical_set("quadrant"), (1.0, 0.0), SMALL_S, cfg).scaled_s0
    w = sphere_measure(2)
    passed = _rel(ball, w) <= 0.05 and _rel(quadrant, np.pi) <= 0.05
    return passed, ball, w, {"quadrant_edge": quadrant, "quadrant_target": np.pi}


def classical_limit(cfg) -> Measured:
    scan = curvature_scan(canonical_set("ball"), (1.0, 0.0), CLASSICAL_S, "times_one_minus_s", cfg, H=1.0)
    return _rel(scan.extrapolated_limit, 2.0) <= 0.05, scan.extrapolated_limit, 2.0, {
        "values": scan.mode_values(), "spread": scan.extrapolation_error}


def odd_symmetry(cfg) -> Measured:
    worst, rows = 0.0, []
    for name, E in (("halfspace", HalfSpace((0.0, 1.0), 0.0)), ("cubic", canonical_set("cubic_supergraph"))):
        for s in ODD_SYMMETRY_S:
            res = curvature_at(E, (0.0, 0.0), s, cfg)
            # roundoff floor for an error estimate that is itself zero
            ratio = abs(res.value) / max(10.0 * res.error_estimate, 1e-10)
            worst = max(worst, ratio)
            rows.append((name, s, res.value, res.error_estimate))
    return worst <= 1.0, worst, 1.0, {"rows": rows}


def annulus_root(cfg) -> Measured:
    res = sign_change_root(canonical_set("annulus"), (1.0, 0.0), (0.1, 0.9), cfg)
    passed = (res.converged and not res.degenerate and res.width <= 1e-3 + 1e-12
              and abs(res.value) <= 2.0 * res.error_estimate + 1e-12
              and res.f_lo > 0.0 > res.f_hi)
    return passed, res.s_root, float("nan"), res.to_dict()


# ========== alpha calculus ==========

def calculus(cfg) -> Measured:
    quadrant = canonical_set("quadrant")
    upper = HalfSpace((0.0, 1.0), 0.0)
    reports = [
        alpha_calculus_check(quadrant, None, "scaling", cfg, samples=20),
        alpha_calculus_check(quadrant, upper, "monotone", cfg, samples=20),
        alpha_calculus_check(quadrant, upper, "symm_diff", cfg, samples=20),
        complement_duality_check(canonical_set("cubic_supergraph"), cfg),
    ]
    worst = max(r.max_violation for r in reports)
    return all(r.passed for r in reports), worst, 0.0, {r.name: r.passed for r in reports}


def mu_bar(cfg) -> Measured:
    E0 = canonical_set("quadrant") - Ball((0.0, 0.0), 1.0)
    report = mu_bar_check(E0, Domain.ball((0.0, 0.0), 1.0), cfg=cfg)
    return report.passed, report.details["extrapolated"], report.details["target"], report.details


# ========== minimizer ==========

def oracle_instances() -> Dict[str, Tuple[Domain, Any]]:
    """The 4x4 suite: unit box with half-plane, empty and quadrant exterior data."""
    omega = Domain.box((-1.0, -1.0), (1.0, 1.0))
    inside = omega.as_set()
    return {
        "halfplane": (omega, HalfSpace((0.0, -1.0), 0.0) - inside),
        "empty": (omega, EmptySet(2)),
        "quadrant": (omega, canonical_set("quadrant") - inside),
    }


def incremental_drift(problem, flips: int = 200, seed: int = 0) -> float:
    """Relative gap between accumulated flip deltas and a from-scratch energy."""
    rng = np.random.default_rng(seed)
    u = rng.integers(0, 2, problem.cell_count).astype(float)
    S = problem.field(u)
    total = discrete_perimeter(problem, u)
    for i in rng.integers(0, problem.cell_count, flips):
        total += apply_flip(problem, u, S, int(i))
    exact = discrete_perimeter(problem, u)
    return abs(total - exact) / max(abs(exact), 1.0)


def oracle_equivalence(cfg) -> Measured:
    fewest, drift, rows = ORACLE_RESTARTS, 0.0, {}
    for name, (omega, E0) in oracle_instances().items():
        problem = build_problem(omega, E0, 0.5, cfg, resolution=4)
        best = exhaustive(problem, cfg)
        run = anneal(problem, cfg, restarts=ORACLE_RESTARTS)
        scale = max(abs(best.energy), 1.0)
        hits = sum(e <= best.energy + 1e-9 * scale for e in run.restart_energies)
        fewest = min(fewest, hits)
        drift = max(drift, incremental_drift(problem))
        rows[name] = {"exhaustive": best.energy, "anneal": run.restart_energies, "hits": hits}
    return fewest >= ORACLE_AGREEING and drift <= 1e-9, fewest, ORACLE_AGREEING, {
        "instances": rows, "incremental_drift": drift}


def stickiness_trend(cfg) -> Measured:
    table = stickiness_sweep("quadrant-in-disc", STICKINESS_S, cfg, resolution=64)
    smallest = min(table.rows, key=lambda r: r.s).occupancy
    monotone = table.monotone_in_s(slack=0.02)
    return smallest < 0.1 and monotone, smallest, 0.1, {
        "occupancies": table.occupancies(), "monotone": monotone}


def checker_controls(cfg) -> Measured:
    table = stickiness_sweep("quadrant-in-disc", (0.4, 0.1), cfg, resolution=16)
    on_outputs = all(r.max_principle_ok is not False and r.density_ok is not False for r in table.rows)

    E0 = canonical_set("quadrant") - Ball((0.0, 0.0), 1.0)
    layout = build_layout(Domain.ball((0.0, 0.0), 1.0), E0, cfg, resolution=16)
    problem = problem_from_layout(layout, 0.4, cfg)
    full = np.ones(problem.cell_count, dtype=bool)
    control = MinimizeResult(full, discrete_perimeter(problem, full), "control")
    mp_fails = not maximum_principle_check(control, problem, (0.0, 1.0), 0.0).passed
    density_fails = not density_estimate_check(control, problem, np.pi / 2.0, 0.5, 0.5).passed
    passed = on_outputs and mp_fails and density_fails
    return passed, float(on_outputs), 1.0, {
        "outputs_pass": on_outputs, "control_max_principle_fails": mp_fails,
        "control_density_fails": density_fails}


# ========== thresholds ==========

def delta_values(cfg) -> Measured:
    values = [delta_s(s, 0.0, 2) for s in DELTA_S]
    errors = [abs(v - (5.0 / 6.0) ** (1.0 / s)) for v, s in zip(values, DELTA_S)]
    increasing = all(b > a for a, b in zip(values, values[1:]))
    return max(errors) <= 1e-12 and increasing, max(errors), 1e-12, {"values": values}


CRITERIA: List[Criterion] = [
    Criterion(1, "cone alpha closed form", cone_alpha),
    Criterion(2, "alpha of the x^3 supergraph", cubic_alpha),
    Criterion(3, "alpha of the parabola", parabola_alpha),
    Criterion(4, "alpha of the tanh graph", tanh_alpha),
    Criterion(5, "linear cone graph in R^3", sigma_alpha),
    Criterion(6, "s -> 0 curvature limit", small_s_curvature),
    Criterion(7, "s -> 1 classical limit", classical_limit),
    Criterion(8, "odd-symmetry exactness", odd_symmetry),
    Criterion(9, "annulus sign-change root", annulus_root),
    Criterion(10, "alpha calculus", calculus),
    Criterion(11, "mu_bar against alpha_bar |Omega|", mu_bar, slow=True),
    Criterion(12, "minimizer oracle equivalence", oracle_equivalence),
    Criterion(13, "stickiness trend", stickiness_trend, slow=True),
    Criterion(14, "checker negative controls", checker_controls),
    Criterion(15, "delta_s values", delta_values),
]


def run_criterion(criterion: Criterion, cfg) -> CriterionResult:
    start = time.perf_counter()
    try:
        passed, value, target, details = criterion.measure(cfg)
        error = None
    except FracPerimException as e:
        logger.error(f"Criterion {criterion.number} raised: {e.message}")
        passed, value, target, details, error = False, float("nan"), float("nan"), {}, e.message
    result = CriterionResult(criterion.number, criterion.name, bool(passed), float(value), float(target),
                             time.perf_counter() - start, details, error)
    log = logger.info if result.passed else logger.warning
    log(result.line())
    return result


def run_acceptance(numbers: Optional[Sequence[int]] = None, cfg=None,
                   include_slow: bool = True) -> List[CriterionResult]:
    """Run the selected criteria (all by default) in order.

    Args:
        numbers: Criterion numbers to run
        cfg: Full configuration
        include_slow: Whether to run the slow criteria

    Returns:
        One CriterionResult per criterion run
    """
    full = get_config() if cfg is None else cfg
    wanted = None if numbers is None else set(numbers)
    chosen = [c for c in CRITERIA
              if (wanted is None or c.number in wanted) and (include_slow or not c.slow)]
    return [run_criterion(c, full) for c in chosen]
