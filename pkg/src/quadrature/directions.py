"""
Direction rules on S^{n-1}.

A rule lists one representative direction per antipodal pair together
with the quadrature weight of that direction; the opposite direction
carries the same weight. Summed over both members of every pair the
weights add up to omega_n.

Rules are built from Gauss-Legendre panels (numpy.polynomial.legendre),
either uniform with optional breakpoints at known kinks of the
integrand, or geometrically graded toward the tangent directions of a
boundary point where the principal-value integrand is singular.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from src.exceptions import InvalidParameter

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DirectionRule:
    dirs: np.ndarray      # (P, n), one direction per antipodal pair
    weights: np.ndarray   # (P,)

    @property
    def pairs(self) -> int:
        return self.weights.size

    @property
    def dim(self) -> int:
        return self.dirs.shape[1]

    def total_measure(self) -> float:
        return 2.0 * float(np.sum(self.weights))

    def rotated(self, matrix: np.ndarray) -> "DirectionRule":
        return DirectionRule(self.dirs @ np.asarray(matrix).T, self.weights)


@lru_cache(maxsize=32)
def _leggauss(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return leggauss(order)


def gauss_on(breaks: Sequence[float], order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on consecutive intervals of `breaks`."""
    if order < 1:
        raise InvalidParameter("order", order, "need at least one node")
    x, w = _leggauss(order)
    b = np.asarray(breaks, dtype=float)
    lo, hi = b[:-1], b[1:]
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def uniform_breaks(a: float, b: float, panels: int, extra: Iterable[float] = ()) -> np.ndarray:
    pts = set(np.linspace(a, b, panels + 1).tolist())
    pts.update(float(e) for e in extra if a < e < b)
    return np.array(sorted(pts))


def graded_breaks(a: float, b: float, levels: int, ratio: float) -> np.ndarray:
    """Breakpoints on [a, b] refined geometrically toward a."""
    span = b - a
    return np.array([a] + [a + span * ratio ** k for k in range(levels, -1, -1)])


def tangent_frame(normal: np.ndarray) -> np.ndarray:
    """Orthonormal columns completing `normal` (last column is the normal)."""
    n = normal.size
    Q, _ = np.linalg.qr(np.column_stack([normal, np.eye(n)]))
    Q = Q[:, :n]
    if Q[:, 0] @ normal < 0:
        Q[:, 0] = -Q[:, 0]
    return np.column_stack([Q[:, 1:], Q[:, 0]])


def uniform_rule(n: int, panels: int = 16, order: int = 8, polar_panels: int = 32,
                 polar_order: int = 4, azimuth_nodes: int = 64,
                 angle_breaks: Sequence[float] = (), z_breaks: Sequence[float] = ()) -> DirectionRule:
    """Pairs covering the sphere with Gauss panels.

    n = 2: polar angle in [0, pi) with breakpoints `angle_breaks` (taken mod pi).
    n = 3: z = theta_3 in (0, 1) with breakpoints `z_breaks`; azimuth by the
    trapezoid rule, or by Gauss panels between `angle_breaks` when given.
    """
    if n == 1:
        return DirectionRule(np.ones((1, 1)), np.ones(1))
    if n == 2:
        extra = [float(np.mod(a, np.pi)) for a in angle_breaks]
        phi, w = gauss_on(uniform_breaks(0.0, np.pi, panels, extra), order)
        return DirectionRule(np.column_stack([np.cos(phi), np.sin(phi)]), w)
    if n == 3:
        z, wz = gauss_on(uniform_breaks(0.0, 1.0, polar_panels, z_breaks), polar_order)
        phi, wphi = _azimuth(azimuth_nodes, angle_breaks, order)
        return _assemble_3d(z, wz, phi, wphi, np.eye(3))
    raise InvalidParameter("n", n, "direction rules exist for n <= 3")


def _azimuth(nodes: int, breaks: Sequence[float], order: int) -> Tuple[np.ndarray, np.ndarray]:
    if breaks:
        panels = max(1, nodes // max(order, 1))
        extra = [float(np.mod(a, 2.0 * np.pi)) for a in breaks]
        return gauss_on(uniform_breaks(0.0, 2.0 * np.pi, panels, extra), order)
    step = 2.0 * np.pi / nodes
    return (np.arange(nodes) + 0.5) * step, np.full(nodes, step)


def _assemble_3d(z, wz, phi, wphi, frame: np.ndarray) -> DirectionRule:
    Z, PHI = np.meshgrid(z, phi, indexing="ij")
    W = np.outer(wz, wphi)
    rad = np.sqrt(np.maximum(1.0 - Z * Z, 0.0))
    local = np.stack([rad * np.cos(PHI), rad * np.sin(PHI), Z], axis=-1).reshape(-1, 3)
    return DirectionRule(local @ frame.T, W.ravel())


def boundary_rule(normal, levels: int = 48, order: int = 8, ratio: float = 0.5,
                  azimuth_nodes: int = 32) -> DirectionRule:
    """Pairs refined toward the hyperplane orthogonal to `normal`.

    The principal-value integrand at a boundary point behaves like
    |angle to the tangent plane|^{-s}; panels are graded geometrically
    toward that plane.
    """
    nu = np.asarray(normal, dtype=float)
    nu = nu / np.linalg.norm(nu)
    n = nu.size
    if n == 1:
        return DirectionRule(nu.reshape(1, 1), np.ones(1))
    if n == 2:
        tau = np.array([-nu[1], nu[0]])
        half = 0.5 * np.pi
        psi_lo, w_lo = gauss_on(graded_breaks(0.0, half, levels, ratio), order)
        psi = np.concatenate([psi_lo, np.pi - psi_lo])
        w = np.concatenate([w_lo, w_lo])
        dirs = np.cos(psi)[:, None] * tau + np.sin(psi)[:, None] * nu
        return DirectionRule(dirs, w)
    if n == 3:
        z, wz = gauss_on(graded_breaks(0.0, 1.0, levels, ratio), order)
        phi, wphi = _azimuth(azimuth_nodes, (), order)
        return _assemble_3d(z, wz, phi, wphi, tangent_frame(nu))
    raise InvalidParameter("n", n, "direction rules exist for n <= 3")
