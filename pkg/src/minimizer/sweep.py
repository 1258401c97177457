"""
Stickiness sweeps: minimize one geometry over a list of s and classify.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config.settings import get_config
from src.exceptions import InvalidParameter
from src.geometry.catalog import canonical_set
from src.geometry.domain import Domain
from src.geometry.sets import Ball, HalfSpace, SetSpec, sphere_measure
from src.minimizer.checks import density_estimate_check, is_delta_dense, maximum_principle_check
from src.minimizer.grid import build_layout, problem_from_layout
from src.minimizer.solvers import MinimizeResult, minimize
from src.thresholds.constants import ThresholdSet

logger = logging.getLogger(__name__)

CLASSES = ("empty", "full", "trace", "delta_dense", "other")
TRACE_MISMATCH = 0.05
DENSITY_GAMMA = 0.5


@dataclass
class Preset:
    name: str
    omega: Domain
    exterior: SetSpec
    alpha_bar: float
    trace: Optional[SetSpec] = None
    max_principle: Optional[Tuple[Tuple[float, ...], float]] = None


def _unit_disc() -> Domain:
    return Domain.ball((0.0, 0.0), 1.0)


def _quadrant_in_disc() -> Preset:
    disc = _unit_disc()
    E0 = canonical_set("quadrant", n=2) - Ball((0.0, 0.0), 1.0)
    return Preset("quadrant-in-disc", disc, E0, np.pi / 2.0, max_principle=((0.0, 1.0), 0.0))


def _halfplane_in_disc() -> Preset:
    disc = _unit_disc()
    upper = HalfSpace((0.0, 1.0), 0.0)
    return Preset("halfplane-in-disc", disc, upper - Ball((0.0, 0.0), 1.0), np.pi, trace=upper,
                  max_principle=((0.0, 1.0), 0.0))


def _candy() -> Preset:
    disc = _unit_disc()
    E0 = canonical_set("butterscotch_candy", n=2) - Ball((0.0, 0.0), 1.0)
    return Preset("candy", disc, E0, 0.0)


def _bounded_e0() -> Preset:
    return Preset("bounded-E0", _unit_disc(), Ball((3.0, 0.0), 0.5), 0.0,
                  max_principle=((1.0, 0.0), 2.4))


PRESETS: Dict[str, Callable[[], Preset]] = {
    "quadrant-in-disc": _quadrant_in_disc,
    "halfplane-in-disc": _halfplane_in_disc,
    "candy": _candy,
    "bounded-E0": _bounded_e0,
}


def get_preset(name: str) -> Preset:
    if name not in PRESETS:
        raise InvalidParameter("preset", name, f"must be one of {sorted(PRESETS)}")
    return PRESETS[name]()


@dataclass
class PhaseRow:
    s: float
    occupancy: float
    energy: float
    classification: str
    delta_s: Optional[float]
    delta_used: Optional[float]
    clamped: bool
    solver: str
    restarts_agreeing: int
    restarts: int
    low_confidence: bool
    max_principle_ok: Optional[bool] = None
    density_ok: Optional[bool] = None


@dataclass
class PhaseTable:
    preset: str
    alpha_bar: float
    resolution: int
    rows: List[PhaseRow] = field(default_factory=list)
    results: List[MinimizeResult] = field(default_factory=list, repr=False)

    HEADER = ("s", "occupancy", "energy", "classification", "delta_s", "delta_used", "clamped",
              "solver", "restarts_agreeing", "restarts", "low_confidence", "max_principle_ok",
              "density_ok")

    def csv_rows(self) -> List[tuple]:
        return [tuple(getattr(r, k) for k in self.HEADER) for r in self.rows]

    def occupancies(self) -> List[float]:
        return [r.occupancy for r in self.rows]

    @property
    def low_confidence(self) -> bool:
        return any(r.low_confidence for r in self.rows)

    def monotone_in_s(self, slack: float = 0.0) -> bool:
        """Occupancy does not grow as s decreases (up to slack)."""
        ordered = sorted(self.rows, key=lambda r: -r.s)
        occ = [r.occupancy for r in ordered]
        return all(b <= a + slack for a, b in zip(occ, occ[1:]))


def classify(result: MinimizeResult, problem, preset: Preset, delta: Optional[float]) -> str:
    state = np.asarray(result.state, dtype=bool)
    if not state.any():
        return "empty"
    if state.all():
        return "full"
    if preset.trace is not None:
        mismatch = float(np.mean(state != problem.state_of(preset.trace)))
        if mismatch <= TRACE_MISMATCH:
            return "trace"
    if delta is not None and is_delta_dense(state, preset.omega, delta, problem=problem).dense:
        return "delta_dense"
    return "other"


def stickiness_sweep(preset, s_list: Sequence[float], cfg=None, resolution: Optional[int] = None,
                     solver: str = "auto", seed: Optional[int] = None) -> PhaseTable:
    """Minimize the preset geometry for every s and classify the minimizers.

    Args:
        preset: Preset name or Preset
        s_list: Orders to sweep
        cfg: Full configuration
        resolution: Cells across Omega (default grid.resolution)
        solver: Passed to minimize
        seed: First annealing seed

    Returns:
        PhaseTable, one row per s in the given order
    """
    full = get_config() if cfg is None else cfg
    p = get_preset(preset) if isinstance(preset, str) else preset
    layout = build_layout(p.omega, p.exterior, full, resolution)
    n = p.omega.n
    thresholds = ThresholdSet(n, p.alpha_bar) if p.alpha_bar < sphere_measure(n) else None
    table = PhaseTable(p.name, p.alpha_bar, layout.resolution)

    for s in s_list:
        problem = problem_from_layout(layout, s, full)
        result = minimize(problem, full, solver=solver, seed=seed)
        delta = delta_used = None
        clamped = False
        if thresholds is not None and thresholds.in_regime:
            delta = thresholds.delta_of_s(s)
            delta_used = max(delta, 2.0 * layout.h)
            clamped = delta_used > delta
            if clamped:
                logger.info(f"delta_s={delta:.4g} below two cells at s={s}; using {delta_used:.4g}")
        label = classify(result, problem, p, delta_used)

        mp_ok = None
        if p.max_principle is not None:
            nu, a = p.max_principle
            mp_ok = maximum_principle_check(result, problem, nu, a).passed
        density_ok = None
        if delta_used is not None:
            density_ok = density_estimate_check(result, problem, p.alpha_bar, delta_used, DENSITY_GAMMA).passed

        row = PhaseRow(float(s), result.occupancy, result.energy, label, delta, delta_used, clamped,
                       result.solver, result.restarts_agreeing, result.restarts, result.low_confidence,
                       mp_ok, density_ok)
        table.rows.append(row)
        table.results.append(result)
        logger.info(f"{p.name} s={s}: {label}, occupancy {result.occupancy:.4f}")
    return table
