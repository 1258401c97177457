"""
Discrete fractional perimeter P_s(E, Omega) and single-flip increments.
"""

import logging
from typing import Optional

import numpy as np

from src.exceptions import InvalidParameter
from src.minimizer.grid import GridProblem

logger = logging.getLogger(__name__)


def _as_state(P: GridProblem, state) -> np.ndarray:
    u = np.asarray(state)
    if u.shape != (P.cell_count,):
        raise InvalidParameter("state", u.shape, f"expected one value per Omega cell ({P.cell_count})")
    return u.astype(float)


def discrete_perimeter(P: GridProblem, state) -> float:
    """Energy of a state on the Omega cells, recomputed from scratch."""
    u = _as_state(P, state)
    return float(P.c0 + P.bias @ u - u @ P.field(u))


def energy_from_field(P: GridProblem, u: np.ndarray, S: np.ndarray) -> float:
    return float(P.c0 + P.bias @ u - u @ S)


def empty_state_energy(P: GridProblem) -> float:
    """P_s(emptyset, Omega): interaction of the Omega cells with E0."""
    return P.c0


def flip_deltas(P: GridProblem, state, S: Optional[np.ndarray] = None) -> np.ndarray:
    """Energy change of flipping each cell alone."""
    u = _as_state(P, state)
    S = P.field(u) if S is None else S
    return (1.0 - 2.0 * u) * (P.bias - 2.0 * S)


def flip_delta(P: GridProblem, state, i: int, S: Optional[np.ndarray] = None) -> float:
    """Energy change of flipping cell i, from the local field."""
    u = _as_state(P, state)
    if S is None:
        S_i = float(P.row(i) @ u)
    else:
        S_i = float(S[i])
    return float((1.0 - 2.0 * u[i]) * (P.bias[i] - 2.0 * S_i))


def apply_flip(P: GridProblem, u: np.ndarray, S: np.ndarray, i: int) -> float:
    """Flip cell i of u in place, update the field S in place, return the energy change."""
    sgn = 1.0 - 2.0 * u[i]
    delta = sgn * (P.bias[i] - 2.0 * S[i])
    u[i] = 1.0 - u[i]
    S += sgn * P.row(i)
    return float(delta)
