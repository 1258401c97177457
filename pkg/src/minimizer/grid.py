"""
Rasterized minimization problems.

A `GridLayout` fixes the geometry: a box of cubic cells covering Omega
plus a collar of `collar_cells` cells on every side. Cells whose center
lies in Omega are the unknowns; collar cells carry the exterior data E0
and everything beyond the box enters through per-cell ray tails. The
layout does not depend on s, so an s-sweep traces the tails once.

A `GridProblem` adds the s-dependent weights. For a state u on the Omega
cells the discrete energy is the quadratic form

    P(u) = c0 + bias . u - u . S(u),   S(u)_i = sum_j K_ij u_j  (j in Omega)

which counts every Omega-Omega pair once and every Omega-exterior pair
once.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.signal import fftconvolve

from src.config.settings import get_config
from src.exceptions import InvalidParameter, ProblemTooLarge
from src.geometry.domain import Domain, signed_distance
from src.geometry.sets import Raster, SetSpec
from src.minimizer.kernels import kernel_table, tail_structures, tail_values
from src.quadrature.rays import RayStructure

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class GridLayout:
    omega: Domain
    exterior: SetSpec
    resolution: int
    h: float
    origin: np.ndarray
    shape: Tuple[int, ...]
    omega_mask: np.ndarray       # bool grid
    exterior_occ: np.ndarray     # bool grid, False on Omega cells
    cells: np.ndarray            # (m, n) grid indices of Omega cells
    tails: List[RayStructure] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def cell_count(self) -> int:
        return self.cells.shape[0]

    def centers(self, index=None) -> np.ndarray:
        idx = self.cells if index is None else np.asarray(index)
        return self.origin + (idx + 0.5) * self.h

    def grid_centers(self) -> np.ndarray:
        axes = [self.origin[k] + (np.arange(m) + 0.5) * self.h for k, m in enumerate(self.shape)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def box(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.origin, self.origin + self.h * np.asarray(self.shape)


def omega_overlap(E0: SetSpec, omega: Domain, samples: int = 4000, seed: int = 0) -> int:
    """Number of random points of Omega that lie in E0 (0 when E0 is exterior data)."""
    rng = np.random.default_rng(seed)
    lo, hi = omega.bounding_box()
    X = rng.uniform(lo, hi, size=(samples, omega.n))
    X = X[np.asarray(signed_distance(omega, X)) < 0]
    return int(np.sum(E0.indicator(X)))


def build_layout(omega: Domain, E0: SetSpec, cfg=None, resolution: Optional[int] = None) -> GridLayout:
    """Rasterize Omega and the collar and trace the exterior tails.

    Args:
        omega: Reference domain (n = 1 or 2)
        E0: Exterior data, disjoint from Omega
        cfg: Full configuration
        resolution: Cells across the widest side of Omega

    Raises:
        InvalidParameter: For n outside {1, 2} or a dimension mismatch
        ProblemTooLarge: When the raster exceeds the size limits
    """
    full = get_config() if cfg is None else cfg
    gc = full.grid
    n = omega.n
    if n not in (1, 2):
        raise InvalidParameter("n", n, "minimization is implemented for n = 1 and n = 2")
    if E0.dim != n:
        raise InvalidParameter("exterior", E0.dim, f"exterior data must live in R^{n}")
    res = int(gc.resolution if resolution is None else resolution)
    if res < 1:
        raise InvalidParameter("resolution", res, "must be positive")
    limit = gc.max_cells_2d if n == 2 else gc.max_cells_1d
    if res ** n > limit:
        raise ProblemTooLarge(res ** n, limit)

    lo, hi = omega.bounding_box()
    width = hi - lo
    h = float(np.max(width)) / res
    W = int(gc.collar_cells)
    counts = np.maximum(np.rint(width / h).astype(int), 1)
    shape = tuple(int(c + 2 * W) for c in counts)
    center = 0.5 * (lo + hi)
    origin = center - 0.5 * h * np.asarray(shape)

    axes = [origin[k] + (np.arange(m) + 0.5) * h for k, m in enumerate(shape)]
    X = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    omega_mask = np.asarray(signed_distance(omega, X)) < 0
    exterior_occ = E0.indicator(X.reshape(-1, n)).reshape(shape) & ~omega_mask
    cells = np.argwhere(omega_mask)
    centers = origin + (cells + 0.5) * h

    box_lo, box_hi = origin, origin + h * np.asarray(shape)
    tails = tail_structures(E0, centers, box_lo, box_hi, full, workers=full.workers())
    logger.info(f"Grid layout: {cells.shape[0]} unknown cells, grid {shape}, h={h:.4g}, collar {W}")
    return GridLayout(omega, E0, res, h, origin, shape, omega_mask, exterior_occ, cells, tails)


@dataclass(eq=False)
class GridProblem:
    layout: GridLayout
    s: float
    kernel: np.ndarray = field(repr=False)
    bias: np.ndarray = field(repr=False)
    c0: float
    tail_plus: np.ndarray = field(repr=False)
    tail_minus: np.ndarray = field(repr=False)
    _pairs: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def cell_count(self) -> int:
        return self.layout.cell_count

    @property
    def h(self) -> float:
        return self.layout.h

    @property
    def omega(self) -> Domain:
        return self.layout.omega

    @property
    def exterior(self) -> SetSpec:
        return self.layout.exterior

    def _offsets(self, i: int) -> Tuple[np.ndarray, ...]:
        c = self.layout.cells
        off = np.asarray(self.layout.shape) - 1 + c - c[i]
        return tuple(off.T)

    def row(self, i: int) -> np.ndarray:
        """K_ij over all Omega cells j."""
        return self.kernel[self._offsets(i)]

    def pair_matrix(self) -> np.ndarray:
        """Dense Omega-Omega weights (small problems only)."""
        if self._pairs is None:
            c = self.layout.cells
            off = np.asarray(self.layout.shape) - 1 + c[:, None, :] - c[None, :, :]
            self._pairs = self.kernel[tuple(np.moveaxis(off, -1, 0))]
        return self._pairs

    def to_grid(self, state) -> np.ndarray:
        """Occupancy of the whole raster: state on Omega, E0 on the collar."""
        u = np.asarray(state, dtype=bool)
        if u.shape != (self.cell_count,):
            raise InvalidParameter("state", u.shape, f"expected ({self.cell_count},)")
        occ = self.layout.exterior_occ.copy()
        occ[tuple(self.layout.cells.T)] = u
        return occ

    def state_of(self, F: SetSpec) -> np.ndarray:
        """Trace of a set on the Omega cell centers."""
        return F.indicator(self.layout.centers())

    def field(self, state) -> np.ndarray:
        """S(u) on the Omega cells, from scratch."""
        u = np.zeros(self.layout.shape)
        u[tuple(self.layout.cells.T)] = np.asarray(state, dtype=float)
        return fftconvolve(u, self.kernel, mode="same")[tuple(self.layout.cells.T)]

    def as_set(self, state) -> Raster:
        return Raster(self.to_grid(state), self.layout.origin, self.h, outside=self.exterior)

    def for_s(self, s: float, cfg=None) -> "GridProblem":
        return problem_from_layout(self.layout, s, cfg)

    def to_dict(self):
        return {
            "domain": self.omega.to_dict(),
            "resolution": self.layout.resolution,
            "exterior": self.exterior.to_dict(),
            "s": self.s,
            "cells": self.cell_count,
            "h": self.h,
        }


def problem_from_layout(layout: GridLayout, s: float, cfg=None) -> GridProblem:
    """Weights, biases and tails of the energy at order s."""
    full = get_config() if cfg is None else cfg
    if not 0.0 < s < 1.0:
        raise InvalidParameter("s", s, "must lie in (0, 1)")
    K = kernel_table(layout.dim, s, layout.shape, layout.h, full.grid.near_radius)
    idx = tuple(layout.cells.T)
    M = layout.omega_mask.astype(float)
    deg_omega = fftconvolve(M, K, mode="same")[idx]
    deg_collar = fftconvolve(1.0 - M, K, mode="same")[idx]
    collar = fftconvolve(layout.exterior_occ.astype(float), K, mode="same")[idx]
    plus, minus = tail_values(layout.tails, s, layout.h)

    c0 = float(np.sum(collar + plus))
    bias = deg_omega + deg_collar - 2.0 * collar + minus - plus
    logger.debug(f"Problem at s={s}: c0={c0:.6g}, {layout.cell_count} cells")
    return GridProblem(layout, float(s), K, bias, c0, plus, minus)


def build_problem(omega: Domain, E0: SetSpec, s: float, cfg=None, resolution: Optional[int] = None,
                  layout: Optional[GridLayout] = None) -> GridProblem:
    """Rasterized problem for (Omega, E0, s); pass `layout` to reuse tails across s."""
    if layout is None:
        layout = build_layout(omega, E0, cfg, resolution)
    return problem_from_layout(layout, s, cfg)
