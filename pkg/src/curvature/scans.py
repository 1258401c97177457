"""
Curvature scans in s, asymptotic predictions and continuity probes.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.alpha.alpha import alpha_limit
from src.alpha.extrapolation import extrapolate_to_one, extrapolate_to_zero
from src.config.settings import FracPerimConfig, get_config
from src.curvature.charts import classical_curvature, curvature_at, local_chart
from src.curvature.graph_formula import CurvatureResult
from src.exceptions import GraphLeavesCylinder, InvalidParameter
from src.geometry.graphs import perturbed_graph
from src.geometry.sets import SetSpec, Supergraph, sphere_measure
from src.models import CheckReport

logger = logging.getLogger(__name__)

SCAN_MODES = ("raw", "times_s", "times_one_minus_s", "scaled_both")
PROBE_KINDS = ("graph", "point", "s")


@dataclass
class ScanResult:
    mode: str
    results: List[CurvatureResult]
    predicted_limit: Optional[float] = None
    extrapolated_limit: Optional[float] = None
    extrapolation_error: Optional[float] = None
    notes: Dict[str, Any] = field(default_factory=dict)

    @property
    def s_values(self) -> List[float]:
        return [r.s for r in self.results]

    def mode_values(self) -> List[float]:
        key = {"raw": "value", "times_s": "scaled_s0", "times_one_minus_s": "scaled_s1",
               "scaled_both": "scaled_both"}[self.mode]
        return [getattr(r, key) for r in self.results]

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.results)

    def csv_rows(self) -> List[tuple]:
        return [(r.s, r.value, r.scaled_s0, r.scaled_s1, r.local_part, r.tail_part, r.error_estimate)
                for r in self.results]


def _evaluate(E: SetSpec, p: np.ndarray, s_grid: Sequence[float], cfg: FracPerimConfig) -> List[CurvatureResult]:
    chart = None
    if E.dim > 1 and not (isinstance(E, Supergraph) and E.axis == E.dim - 1):
        try:
            chart = local_chart(E, p, cfg)
        except (GraphLeavesCylinder, InvalidParameter) as e:
            logger.info(f"No chart at {p.tolist()}: {e.message}")
    workers = min(cfg.workers(), len(s_grid))
    if workers <= 1:
        return [curvature_at(E, p, s, cfg, chart=chart) for s in s_grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: curvature_at(E, p, s, cfg, chart=chart), s_grid))


def curvature_scan(E: SetSpec, p, s_grid: Sequence[float], mode: str = "raw", cfg=None,
                   H: Optional[float] = None) -> ScanResult:
    """I_s[E](p) over an s-grid with the asymptotic prediction of the chosen mode.

    Args:
        E: The set
        p: Boundary point
        s_grid: Values of s in (0, 1)
        mode: One of SCAN_MODES
        cfg: Full configuration
        H: Classical (average) mean curvature at p for times_one_minus_s;
            computed from the chart when omitted

    Returns:
        ScanResult; times_s predicts omega_n - 2 alpha(E), times_one_minus_s
        predicts omega_{n-1} H
    """
    if mode not in SCAN_MODES:
        raise InvalidParameter("mode", mode, f"must be one of {SCAN_MODES}")
    full = get_config() if cfg is None else cfg
    p = np.asarray(p, dtype=float)
    grid = list(s_grid)
    results = _evaluate(E, p, grid, full)
    scan = ScanResult(mode, results)
    n = E.dim

    if mode == "times_s":
        est = alpha_limit(E, cfg=full)
        alpha = est.closed_form if est.closed_form is not None else est.extrapolated_limit
        scan.predicted_limit = sphere_measure(n) - 2.0 * alpha
        scan.notes["alpha"] = alpha
        ordered = sorted(zip(grid, scan.mode_values()), reverse=True)
        if len(ordered) >= 2:
            ext = extrapolate_to_zero([s for s, _ in ordered], [v for _, v in ordered])
            scan.extrapolated_limit, scan.extrapolation_error = ext.limit, ext.error_bar
    elif mode == "times_one_minus_s":
        curvature = classical_curvature(E, p, full) if H is None else float(H)
        scan.predicted_limit = sphere_measure(n - 1) * curvature
        scan.notes["H"] = curvature
        if len(grid) >= 2:
            scan.extrapolated_limit, scan.extrapolation_error = extrapolate_to_one(grid, scan.mode_values())

    if not scan.all_converged:
        logger.warning(f"Curvature scan at {p.tolist()}: some values did not converge")
    return scan


def _probe_point(E: SetSpec, p: np.ndarray, eta: float, cfg) -> np.ndarray:
    """Boundary point at tangential offset eta from p."""
    if eta == 0.0:
        return p
    if isinstance(E, Supergraph) and E.axis == E.dim - 1:
        base = p[:-1].copy()
        base[0] += eta
        return np.append(base, float(E.graph.eval(base)))
    chart = local_chart(E, p, cfg)
    base = np.zeros(E.dim - 1)
    base[0] = eta
    return chart.boundary_point(base)


def continuity_probe(E: SetSpec, p, kind: str, etas: Sequence[float], s: float, cfg=None) -> CheckReport:
    """|I_s[E_eta](p_eta) - I_s[E](p)| along a decreasing schedule of perturbation sizes.

    kind = "graph" perturbs the graph of a supergraph by eta times a bump,
    "point" moves p along the boundary, "s" shifts s by eta.
    """
    if kind not in PROBE_KINDS:
        raise InvalidParameter("kind", kind, f"must be one of {PROBE_KINDS}")
    etas = [float(e) for e in etas]
    if any(b > a for a, b in zip(etas, etas[1:])):
        raise InvalidParameter("etas", etas, "must be non-increasing")
    full = get_config() if cfg is None else cfg
    p = np.asarray(p, dtype=float)
    base = curvature_at(E, p, s, full)

    diffs, errors = [], []
    for eta in etas:
        if eta == 0.0:
            diffs.append(0.0)
            errors.append(0.0)
            continue
        if kind == "graph":
            if not isinstance(E, Supergraph):
                raise InvalidParameter("E", type(E).__name__, "graph perturbations need a supergraph")
            u_eta = perturbed_graph(E.graph, eta, center=p[:-1])
            E_eta = Supergraph(u_eta, E.axis)
            p_eta = np.append(p[:-1], float(u_eta.eval(p[:-1])))
            res = curvature_at(E_eta, p_eta, s, full)
        elif kind == "point":
            res = curvature_at(E, _probe_point(E, p, eta, full), s, full)
        else:
            res = curvature_at(E, p, min(s + eta, 1.0 - 1e-9), full)
        diffs.append(abs(res.value - base.value))
        errors.append(res.error_estimate + base.error_estimate)

    slack = [d - e for d, e in zip(diffs, errors)]
    decays = all(b <= a + err for a, b, err in zip(diffs, diffs[1:], errors[1:]))
    passed = decays and diffs[-1] <= diffs[0] + errors[-1]
    return CheckReport(f"continuity[{kind}]", passed, max(max(slack), 0.0) if slack else 0.0, {
        "etas": etas, "differences": diffs, "errors": errors, "s": s, "base_value": base.value,
    }).log()
