"""
CLI module - batch front end.

A `RunConfig` names one command plus its inputs; `run(config)` resolves the
configuration, dispatches to the computational packages and writes a CSV
(with JSON sidecar) or JSON artifact. Tables go to stdout when no output
path is given. Every artifact embeds the resolved configuration, the seed
and the library version.

Exit codes:
    0  success
    1  verification failed (verify only)
    2  bad input
    3  non-converged quadrature (results still written, flagged)
    4  low-confidence minimization
"""

import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from src.alpha.alpha import alpha_limit
from src.config.settings import FracPerimConfig
from src.curvature.charts import curvature_at
from src.curvature.scans import SCAN_MODES, curvature_scan
from src.exceptions import FracPerimException, InvalidData
from src.geometry.catalog import canonical_set
from src.minimizer.grid import build_problem
from src.minimizer.solvers import SOLVERS, minimize
from src.minimizer.sweep import PRESETS, get_preset, stickiness_sweep
from src.persistence import (
    csv_text, json_text, load_problem, load_set_spec, metadata, save_json, save_result, write_csv,
)
from src.thresholds.checks import positive_curvature_check, sign_change_root
from src.thresholds.constants import ThresholdSet

logger = logging.getLogger(__name__)

COMMANDS = ("alpha", "curv", "scan", "root", "delta", "minimize", "sweep", "verify")
EMITS = ("csv", "json")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_NOT_CONVERGED = 3
EXIT_LOW_CONFIDENCE = 4


@dataclass
class RunConfig:
    """Everything one invocation needs; the artifact echoes it back."""

    command: str
    set_name: Optional[str] = None
    set_params: Dict[str, Any] = field(default_factory=dict)
    set_file: Optional[str] = None
    point: Optional[List[float]] = None
    q: Optional[List[float]] = None
    r: float = 1.0
    n: Optional[int] = None
    s: Optional[float] = None
    s_grid: Optional[List[float]] = None
    mode: str = "raw"
    alpha_bar: float = 0.0
    sigma: Optional[float] = None
    witness_center: Optional[List[float]] = None
    witness_radius: Optional[float] = None
    bracket: Optional[Tuple[float, float]] = None
    tol_s: Optional[float] = None
    problem_file: Optional[str] = None
    preset: Optional[str] = None
    resolution: Optional[int] = None
    solver: str = "auto"
    seed: Optional[int] = None
    config_file: Optional[str] = None
    overrides: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    emit: str = "csv"
    output: Optional[str] = None
    criteria: Optional[List[int]] = None
    include_slow: bool = True

    def validate(self) -> None:
        """Raises InvalidData when the command or its required inputs are missing."""
        if self.command not in COMMANDS:
            raise InvalidData("run config", f"command must be one of {COMMANDS}, got {self.command!r}")
        if self.emit not in EMITS:
            raise InvalidData("run config", f"emit must be one of {EMITS}")
        if self.mode not in SCAN_MODES:
            raise InvalidData("run config", f"mode must be one of {SCAN_MODES}")
        if self.solver not in SOLVERS:
            raise InvalidData("run config", f"solver must be one of {SOLVERS}")
        needs_set = self.command in ("alpha", "curv", "scan", "root")
        if needs_set and (self.set_name is None) == (self.set_file is None):
            raise InvalidData("run config", f"{self.command} needs exactly one of --set or --set-file")
        if self.command in ("curv", "scan", "root") and self.point is None:
            raise InvalidData("run config", f"{self.command} needs --point")
        if self.command == "curv" and self.s is None:
            raise InvalidData("run config", "curv needs --s")
        if self.command == "scan" and not self.s_grid:
            raise InvalidData("run config", "scan needs --s-grid")
        if self.command == "root" and self.bracket is None:
            raise InvalidData("run config", "root needs --bracket lo,hi")
        if self.command == "delta" and self.s is None and not self.s_grid:
            raise InvalidData("run config", "delta needs --s or --s-grid")
        if self.witness_center is not None:
            if self.sigma is None or self.witness_radius is None or self.point is None:
                raise InvalidData("run config", "a witness ball needs --sigma, --witness-radius and --point")
            if (self.set_name is None) == (self.set_file is None):
                raise InvalidData("run config", "a witness ball needs exactly one of --set or --set-file")
        if self.command == "minimize" and (self.problem_file is None) == (self.preset is None):
            raise InvalidData("run config", "minimize needs exactly one of --problem or --preset")
        if self.command == "minimize" and self.preset is not None and self.s is None:
            raise InvalidData("run config", "minimize --preset needs --s")
        if self.command == "minimize" and self.output is None:
            raise InvalidData("run config", "minimize needs --output for the result and raster")
        if self.command == "sweep" and (self.preset is None or not self.s_grid):
            raise InvalidData("run config", "sweep needs --preset and --s-grid")
        if self.preset is not None and self.preset not in PRESETS:
            raise InvalidData("run config", f"preset must be one of {sorted(PRESETS)}")

    def to_dict(self) -> Dict[str, Any]:
        return {k: v for k, v in self.__dict__.items()}


@dataclass
class Outcome:
    """What a command hands back to the writer."""

    header: Sequence[str]
    rows: List[tuple]
    payload: Dict[str, Any]
    status: int = EXIT_OK


def resolve_config(rc: RunConfig) -> FracPerimConfig:
    """Config file (or defaults) with the per-section overrides merged on top."""
    base = FracPerimConfig.from_file(rc.config_file) if rc.config_file else FracPerimConfig()
    if not rc.overrides:
        return base
    data = base.to_dict()
    for section, values in rc.overrides.items():
        data.setdefault(section, {}).update(values)
    return FracPerimConfig.from_dict(data)


def resolve_set(rc: RunConfig):
    if rc.set_file is not None:
        return load_set_spec(rc.set_file)
    params = dict(rc.set_params)
    if rc.n is not None:
        params.setdefault("n", rc.n)
    return canonical_set(rc.set_name, **params)


# ========== Commands ==========

def _alpha(rc: RunConfig, cfg: FracPerimConfig) -> Outcome:
    E = resolve_set(rc)
    est = alpha_limit(E, rc.q, rc.r, cfg, rc.s_grid)
    rows = est.csv_rows()
    closed = "" if est.closed_form is None else est.closed_form
    rows.append(("extrapolated_limit", est.extrapolated_limit, est.error_bar, closed))
    if est.oscillating:
        logger.warning(f"alpha_s oscillates: liminf/limsup split {est.limsup_liminf_split}")
    return Outcome(("s", "alpha_s", "s_alpha_s", "closed_form"), rows, est.to_dict())


def _curv(rc: RunConfig, cfg: FracPerimConfig) -> Outcome:
    E = resolve_set(rc)
    res = curvature_at(E, rc.point, rc.s, cfg)
    row = (res.s, res.value, res.scaled_s0, res.scaled_s1, res.scaled_both, res.error_estimate,
           res.method, res.converged)
    status = EXIT_OK if res.converged else EXIT_NOT_CONVERGED
    return Outcome(("s", "value", "s_value", "one_minus_s_value", "scaled_both", "error_estimate",
                    "method", "converged"), [row], res.to_dict(), status)


def _scan(rc: RunConfig, cfg: FracPerimConfig) -> Outcome:
    E = resolve_set(rc)
    scan = curvature_scan(E, rc.point, rc.s_grid, rc.mode, cfg)
    payload = {
        "mode": scan.mode,
        "results": [r.to_dict() for r in scan.results],
        "predicted_limit": scan.predicted_limit,
        "extrapolated_limit": scan.extrapolated_limit,
        "extrapolation_error": scan.extrapolation_error,
        "notes": scan.notes,
    }
    status = EXIT_OK if scan.all_converged else EXIT_NOT_CONVERGED
    return Outcome(("s", "value", "s_value", "one_minus_s_value", "local_part", "tail_part",
                    "error_estimate"), scan.csv_rows(), payload, status)


def _root(rc: RunConfig, cfg: FracPerimConfig) -> Outcome:
    E = resolve_set(rc)
    res = sign_change_root(E, rc.point, rc.bracket, cfg, rc.tol_s)
    header = ("s_root", "width", "value", "error_estimate", "f_lo", "f_hi", "iterations",
              "degenerate", "retried")
    row = tuple(getattr(res, k) for k in header)
    converged = res.converged and (res.degenerate or abs(res.value) <= 2.0 * res.error_estimate + 1e-12)
    return Outcome(header, [row], res.to_dict(), EXIT_OK if converged else EXIT_NOT_CONVERGED)


def _delta(rc: RunConfig, cfg: FracPerimConfig) -> Outcome:
    thresholds = ThresholdSet(2 if rc.n is None else rc.n, rc.alpha_bar)
    grid = [rc.s] if rc.s is not None else list(rc.s_grid)
    rows = [(s, thresholds.beta, thresholds.delta_of_s(s)) for s in grid]
    payload = thresholds.to_dict()
    payload["delta_s"] = {repr(s): d for s, _, d in rows}
    if rc.sigma is None:
        return Outcome(("s", "beta", "delta_s"), rows, payload)

    delta_sigma = thresholds.delta_of_s(rc.sigma)
    payload["sigma"], payload["delta_sigma"] = rc.sigma, delta_sigma
    if rc.witness_center is None:
        return Outcome(("s", "beta", "delta_s", "delta_sigma"),
                       [row + (delta_sigma,) for row in rows], payload)

    # uniform positivity at q for every s <= sigma
    E = resolve_set(rc)
    checked = []
    for row in rows:
        report = positive_curvature_check(E, rc.point, rc.witness_center, rc.witness_radius,
                                          rc.alpha_bar, row[0], rc.sigma, cfg)
        details = report.details
        checked.append(row + (delta_sigma, details["bound"], details["liminf_proxy"], report.passed))
    payload["positive_curvature"] = [dict(zip(("s", "bound", "liminf_proxy", "passed"),
                                              (r[0], r[4], r[5], r[6]))) for r in checked]
    return Outcome(("s", "beta", "delta_s", "delta_sigma", "bound", "liminf_proxy", "positive"),
                   checked, payload)


def _minimize(rc: RunConfig, cfg: FracPerimConfig) -> Outcome:
    if rc.problem_file is not None:
        spec = load_problem(rc.problem_file)
        omega, exterior, s = spec.omega, spec.exterior, spec.s
        resolution = rc.resolution if rc.resolution is not None else spec.resolution
        solver = spec.solver if rc.solver == "auto" else rc.solver
    else:
        preset = get_preset(rc.preset)
        omega, exterior, s = preset.omega, preset.exterior, rc.s
        resolution, solver = rc.resolution, rc.solver
    problem = build_problem(omega, exterior, s, cfg, resolution)
    result = minimize(problem, cfg, solver=solver, seed=rc.seed)
    header = ("s", "resolution", "cells", "energy", "occupancy", "solver", "restarts_agreeing",
              "restarts", "low_confidence")
    row = (s, problem.layout.resolution, problem.cell_count, result.energy, result.occupancy,
           result.solver, result.restarts_agreeing, result.restarts, result.low_confidence)
    status = EXIT_LOW_CONFIDENCE if result.low_confidence else EXIT_OK
    return Outcome(header, [row], {"result": result, "problem": problem}, status)


def _sweep(rc: RunConfig, cfg: FracPerimConfig) -> Outcome:
    table = stickiness_sweep(rc.preset, rc.s_grid, cfg, rc.resolution, rc.solver, rc.seed)
    payload = {"preset": table.preset, "alpha_bar": table.alpha_bar, "resolution": table.resolution,
               "monotone_in_s": table.monotone_in_s(), "rows": [r.__dict__ for r in table.rows]}
    status = EXIT_LOW_CONFIDENCE if table.low_confidence else EXIT_OK
    return Outcome(table.HEADER, table.csv_rows(), payload, status)


def _verify(rc: RunConfig, cfg: FracPerimConfig) -> Outcome:
    from src.verify import CriterionResult, run_acceptance

    results = run_acceptance(rc.criteria, cfg, include_slow=rc.include_slow)
    status = EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAILED
    return Outcome(CriterionResult.HEADER, [r.row() for r in results],
                   {"criteria": [r.to_dict() for r in results]}, status)


HANDLERS: Dict[str, Callable[[RunConfig, FracPerimConfig], Outcome]] = {
    "alpha": _alpha,
    "curv": _curv,
    "scan": _scan,
    "root": _root,
    "delta": _delta,
    "minimize": _minimize,
    "sweep": _sweep,
    "verify": _verify,
}


# ========== Writer ==========

def write_outcome(rc: RunConfig, cfg: FracPerimConfig, outcome: Outcome) -> None:
    """Single writer for every command's artifact."""
    meta = metadata(cfg.to_dict(), rc.seed, command=rc.command, run=rc.to_dict(), status=outcome.status)
    target = cfg.paths.resolve(rc.output)
    if rc.command == "minimize":
        pgm = save_result(target, outcome.payload["result"], outcome.payload["problem"], meta)
        logger.info(f"Raster written to {pgm}")
        return
    if rc.emit == "json":
        document = {"meta": meta, "header": list(outcome.header), "rows": outcome.rows,
                    "payload": outcome.payload}
        if target is None:
            sys.stdout.write(json_text(document))
        else:
            save_json(document, target)
        return
    if target is None:
        sys.stdout.write(csv_text(outcome.header, outcome.rows))
    else:
        write_csv(target, outcome.header, outcome.rows, meta)


def run(rc: RunConfig) -> int:
    """Execute one command and write its artifact.

    Returns:
        Exit status (see module docstring)
    """
    try:
        rc.validate()
        cfg = resolve_config(rc)
        logger.debug(f"Running {rc.command} with {rc.to_dict()}")
        outcome = HANDLERS[rc.command](rc, cfg)
        write_outcome(rc, cfg, outcome)
    except FracPerimException as e:
        logger.error(f"{rc.command} failed: {e.message}")
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_BAD_INPUT
    if outcome.status == EXIT_NOT_CONVERGED:
        logger.warning(f"{rc.command}: some quadratures did not converge; results are flagged")
    elif outcome.status == EXIT_LOW_CONFIDENCE:
        logger.warning(f"{rc.command}: low-confidence minimization")
    return outcome.status
