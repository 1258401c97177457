"""
Binary minimization of the discrete perimeter.

Small problems (<= exhaustive_limit cells) are enumerated exactly. Larger
ones run seeded simulated-annealing restarts: Metropolis moves on random
blocks of cells against the current local field, geometric cooling per
sweep, then steepest single-flip descent to a local minimum. Restarts are
merged by (energy, seed).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.config.settings import get_config
from src.exceptions import InvalidParameter, LowConfidence, ProblemTooLarge
from src.minimizer.energy import apply_flip, discrete_perimeter, energy_from_field, flip_deltas
from src.minimizer.grid import GridProblem

logger = logging.getLogger(__name__)

SOLVERS = ("auto", "exhaustive", "anneal")
ENUMERATION_CHUNK = 1 << 14


@dataclass
class MinimizeResult:
    state: np.ndarray
    energy: float
    solver: str
    restarts_agreeing: int = 1
    restarts: int = 1
    trace: List[float] = field(default_factory=list)
    seeds: List[int] = field(default_factory=list)
    restart_energies: List[float] = field(default_factory=list)
    low_confidence: bool = False

    @property
    def occupancy(self) -> float:
        """|E cap Omega| / |Omega| on the raster."""
        return float(np.mean(self.state)) if self.state.size else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "state": self.state.astype(int).tolist(),
            "energy": self.energy,
            "solver": self.solver,
            "restarts_agreeing": self.restarts_agreeing,
            "restarts": self.restarts,
            "trace": list(self.trace),
            "seeds": list(self.seeds),
            "restart_energies": list(self.restart_energies),
            "low_confidence": self.low_confidence,
            "occupancy": self.occupancy,
        }


def is_local_minimum(P: GridProblem, state, tol: float = 1e-12) -> bool:
    """No single flip lowers the energy by more than tol (relative to the bias scale)."""
    scale = max(1.0, float(np.max(np.abs(P.bias))) if P.cell_count else 1.0)
    return bool(np.all(flip_deltas(P, state) >= -tol * scale))


def exhaustive(P: GridProblem, cfg=None) -> MinimizeResult:
    """Exact optimum by enumerating all 2^m states.

    Raises:
        ProblemTooLarge: If m exceeds grid.exhaustive_limit
    """
    full = get_config() if cfg is None else cfg
    m = P.cell_count
    if m > full.grid.exhaustive_limit:
        raise ProblemTooLarge(m, full.grid.exhaustive_limit)
    A = P.pair_matrix()
    bits = np.arange(m)
    best_code, best_energy = 0, np.inf
    trace = []
    for start in range(0, 1 << m, ENUMERATION_CHUNK):
        codes = np.arange(start, min(start + ENUMERATION_CHUNK, 1 << m))
        U = ((codes[:, None] >> bits[None, :]) & 1).astype(float)
        energies = P.c0 + U @ P.bias - np.einsum("ij,ij->i", U @ A, U)
        k = int(np.argmin(energies))
        if energies[k] < best_energy:
            best_code, best_energy = int(codes[k]), float(energies[k])
        trace.append(best_energy)
    state = ((best_code >> bits) & 1).astype(bool)
    energy = discrete_perimeter(P, state)
    logger.info(f"Exhaustive search over 2^{m} states: energy {energy:.10g}")
    return MinimizeResult(state, energy, "exhaustive", trace=trace)


def descend(P: GridProblem, u: np.ndarray, S: np.ndarray, max_flips: Optional[int] = None) -> int:
    """Steepest single-flip descent in place; returns the number of flips."""
    m = P.cell_count
    if m == 0:
        return 0
    cap = 10 * m + 100 if max_flips is None else max_flips
    tol = 1e-12 * max(1.0, float(np.max(np.abs(P.bias))))
    flips = 0
    while flips < cap:
        d = (1.0 - 2.0 * u) * (P.bias - 2.0 * S)
        i = int(np.argmin(d))
        if d[i] >= -tol:
            return flips
        apply_flip(P, u, S, i)
        flips += 1
    logger.warning(f"Descent stopped after {cap} flips without reaching a local minimum")
    return flips


def anneal_run(P: GridProblem, seed: int, cfg=None) -> Tuple[np.ndarray, float, List[float]]:
    """One annealing restart followed by descent: (state, energy, per-sweep energies)."""
    full = get_config() if cfg is None else cfg
    ac = full.anneal
    m = P.cell_count
    rng = np.random.default_rng(seed)
    u = rng.integers(0, 2, m).astype(float)
    S = P.field(u)
    T = float(np.median(np.abs(flip_deltas(P, u, S)))) if m else 0.0
    T = max(T, 1e-12)
    block = max(1, min(ac.block_size, m // 8))

    best_u, best_energy = u.copy(), energy_from_field(P, u, S)
    trace = [best_energy]
    for _ in range(ac.sweeps):
        order = rng.permutation(m)
        for start in range(0, m, block):
            idx = order[start:start + block]
            d = (1.0 - 2.0 * u[idx]) * (P.bias[idx] - 2.0 * S[idx])
            accept = (d <= 0.0) | (rng.random(idx.size) < np.exp(-np.maximum(d, 0.0) / T))
            for i in idx[accept]:
                apply_flip(P, u, S, int(i))
        T *= ac.cooling
        energy = energy_from_field(P, u, S)
        trace.append(energy)
        if energy < best_energy:
            best_u, best_energy = u.copy(), energy

    u = best_u
    S = P.field(u)
    descend(P, u, S)
    # the incremental field drifts; settle once more on a fresh one
    S = P.field(u)
    descend(P, u, S)
    energy = discrete_perimeter(P, u)
    trace.append(energy)
    return u.astype(bool), energy, trace


def anneal(P: GridProblem, cfg=None, restarts: Optional[int] = None, seed: Optional[int] = None) -> MinimizeResult:
    """Seeded restarts merged by (energy, seed); flags low confidence when only one restart hits the best."""
    full = get_config() if cfg is None else cfg
    ac = full.anneal
    count = ac.restarts if restarts is None else int(restarts)
    if count < 1:
        raise InvalidParameter("restarts", count, "need at least one restart")
    base = ac.seed if seed is None else int(seed)
    seeds = [base + k for k in range(count)]

    workers = min(full.workers(), count)
    if workers <= 1:
        runs = [anneal_run(P, sd, full) for sd in seeds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(lambda sd: anneal_run(P, sd, full), seeds))

    energies = [r[1] for r in runs]
    order = sorted(range(count), key=lambda k: (energies[k], seeds[k]))
    best = order[0]
    best_energy = energies[best]
    agreeing = sum(abs(e - best_energy) <= ac.agreement_rtol * max(abs(best_energy), 1e-300)
                   for e in energies)
    low = count > 1 and agreeing == 1
    logger.info(f"Annealing: {agreeing}/{count} restarts reached energy {best_energy:.10g} "
                f"(seeds {seeds[0]}..{seeds[-1]})")
    if low:
        logger.warning(LowConfidence(agreeing, count).message)
    return MinimizeResult(runs[best][0], best_energy, "anneal+descent", agreeing, count,
                          runs[best][2], seeds, energies, low)


def minimize(P: GridProblem, cfg=None, solver: str = "auto", restarts: Optional[int] = None,
             seed: Optional[int] = None) -> MinimizeResult:
    """Minimize the discrete perimeter of P.

    Args:
        P: The rasterized problem
        cfg: Full configuration
        solver: "auto" (exhaustive up to grid.exhaustive_limit cells), "exhaustive" or "anneal"
        restarts: Annealing restarts (default anneal.restarts)
        seed: First annealing seed (default anneal.seed)

    Returns:
        MinimizeResult whose energy is recomputed from the final state
    """
    if solver not in SOLVERS:
        raise InvalidParameter("solver", solver, f"must be one of {SOLVERS}")
    full = get_config() if cfg is None else cfg
    if solver == "exhaustive" or (solver == "auto" and P.cell_count <= full.grid.exhaustive_limit):
        return exhaustive(P, full)
    return anneal(P, full, restarts, seed)
