"""
Principal-value fractional mean curvature.

    I_s[E](q) = P.V. int (chi_{CE}(y) - chi_E(y)) |y - q|^{-n-s} dy

`PointIntegrator` traces the rays from q once (see rays.py) and then
answers I_s^rho for any (s, rho) without further set queries. The
principal value is the value at the smallest traced radius; the
rho-schedule is kept as a convergence diagnostic and Richardson-
accelerated with the leading correction rho^{1-s} of a C^{1,1} boundary.
"""

import logging
from typing import NamedTuple, Optional, Tuple

import numpy as np

from src.config.settings import FracPerimConfig, QuadratureConfig, get_config
from src.exceptions import InvalidParameter, PointOffBoundary
from src.geometry.sets import SetSpec
from src.quadrature.directions import DirectionRule, boundary_rule, uniform_rule
from src.quadrature.rays import RayStructure, trace_rays

logger = logging.getLogger(__name__)

ON_BOUNDARY_TOL = 1e-8


class PVResult(NamedTuple):
    value: float
    error_estimate: float
    converged: bool
    schedule: Tuple[float, ...]
    truncated: Tuple[float, ...]
    accelerated: float
    tail_part: float
    tail_radius: float


def _quad_cfg(cfg) -> QuadratureConfig:
    if cfg is None:
        return get_config().quadrature
    if isinstance(cfg, FracPerimConfig):
        return cfg.quadrature
    return cfg


def check_s(s: float) -> None:
    if not 0.0 < s < 1.0:
        raise InvalidParameter("s", s, "must lie in (0, 1)")


def assert_on_boundary(E: SetSpec, q) -> None:
    """Raise PointOffBoundary when q is visibly away from the boundary of E."""
    q = np.asarray(q, dtype=float)
    dist = abs(float(E.level(q)))
    if dist > ON_BOUNDARY_TOL * (1.0 + float(np.linalg.norm(q))):
        raise PointOffBoundary(dist)


def default_tail_radius(E: SetSpec, q, r_local: float = 1.0) -> float:
    """2 max{1, diam} with diam measured around q."""
    b = E.bounding_radius()
    if b is None or not np.isfinite(b):
        return 2.0 * max(1.0, r_local)
    reach = b + float(np.linalg.norm(q))
    return 2.0 * max(1.0, r_local, 2.0 * reach)


class PointIntegrator:
    """Ray structures around one point, reusable across s and rho."""

    def __init__(self, E: SetSpec, q, cfg=None, r_local: float = 1.0,
                 normal: Optional[np.ndarray] = None, graded: Optional[bool] = None,
                 t_start: Optional[float] = None):
        self.E = E
        self.q = np.asarray(q, dtype=float)
        if self.q.size != E.dim:
            raise InvalidParameter("q", self.q.tolist(), f"expected a point of R^{E.dim}")
        self.cfg = _quad_cfg(cfg)
        self.r_local = float(r_local)
        self.t_start = self.cfg.t_floor * self.r_local if t_start is None else float(t_start)
        self.t_stop = self.cfg.far_radius * self.r_local
        self.normal = self._resolve_normal(normal, graded)
        self._fine: Optional[RayStructure] = None
        self._coarse: Optional[RayStructure] = None

    def _resolve_normal(self, normal, graded):
        if graded is False or self.E.dim == 1:
            return None
        if normal is not None:
            return np.asarray(normal, dtype=float)
        try:
            return self.E.normal(self.q)
        except InvalidParameter:
            if graded:
                raise
            logger.debug(f"No boundary normal at {self.q.tolist()}, using the uniform rule")
            return None

    def rule(self, order: int) -> DirectionRule:
        c = self.cfg
        if self.normal is not None:
            return boundary_rule(self.normal, levels=c.max_subdiv, order=order,
                                 ratio=c.grading_ratio, azimuth_nodes=c.azimuth_nodes)
        return uniform_rule(self.E.dim, panels=c.angular_panels, order=order,
                            polar_panels=c.angular_panels, polar_order=order,
                            azimuth_nodes=c.azimuth_nodes)

    def _trace(self, order: int) -> RayStructure:
        c = self.cfg
        return trace_rays(self.E, self.q, self.rule(order), self.t_start, self.t_stop,
                          samples_per_decade=c.samples_per_decade,
                          iterations=c.crossing_iterations, chunk=c.chunk_rays)

    @property
    def fine(self) -> RayStructure:
        if self._fine is None:
            self._fine = self._trace(self.cfg.angular_order)
        return self._fine

    @property
    def coarse(self) -> RayStructure:
        if self._coarse is None:
            self._coarse = self._trace(max(1, self.cfg.angular_order // 2))
        return self._coarse

    def truncated(self, s: float, rho: float) -> float:
        """I_s^rho[E](q)."""
        check_s(s)
        if rho < self.t_start:
            raise InvalidParameter("rho", rho, f"must be >= traced start radius {self.t_start:g}")
        return self.fine.integral(s, rho)

    def pv(self, s: float, tail_radius: Optional[float] = None) -> PVResult:
        """Principal value with schedule diagnostics and error estimate."""
        check_s(s)
        c = self.cfg
        schedule = tuple(rho for rho in c.rho_schedule(self.r_local) if rho >= self.t_start)
        fine = self.fine
        values = tuple(fine.integral(s, rho) for rho in schedule)
        value = fine.integral(s)

        accelerated = values[-1] if values else value
        if len(values) >= 2:
            q = (schedule[-1] / schedule[-2]) ** (1.0 - s)
            accelerated = (values[-1] - q * values[-2]) / (1.0 - q)
        converged = abs(accelerated - value) <= c.rel_tol * (abs(value) + 1.0)

        rule_error = abs(value - self.coarse.integral(s))
        error = abs(accelerated - value) + rule_error + fine.far_error(s)

        R = tail_radius if tail_radius is not None else (
            c.tail_radius if c.tail_radius is not None else default_tail_radius(self.E, self.q, self.r_local))
        tail = fine.integral(s, max(R, self.t_start))

        if not converged:
            logger.warning(f"PV at {self.q.tolist()} s={s:g} not settled: "
                           f"value={value:.6g} accelerated={accelerated:.6g}")
        return PVResult(value, error, converged, schedule, values, accelerated, tail, R)


def pv_curvature_integral(E: SetSpec, q, s: float, cfg=None, r_local: float = 1.0,
                          on_boundary: bool = True, normal=None) -> PVResult:
    """I_s[E](q) as a principal value.

    Args:
        E: The set
        q: Point of the boundary of E
        s: Fractional order in (0, 1)
        cfg: QuadratureConfig (or full config); defaults to get_config()
        r_local: Length scale of the geometry around q
        on_boundary: Assert q lies on the boundary of E
        normal: Outward normal at q when known

    Returns:
        PVResult; `converged` is False when the accelerated schedule
        disagrees with the value beyond rel_tol

    Raises:
        PointOffBoundary: If on_boundary and q is away from the boundary
        InvalidParameter: If s is outside (0, 1)
    """
    check_s(s)
    if on_boundary:
        assert_on_boundary(E, q)
    return PointIntegrator(E, q, cfg, r_local, normal=normal).pv(s)


def curvature_truncated(E: SetSpec, q, s: float, rho: float, cfg=None) -> float:
    """I_s^rho[E](q), the integral outside B_rho(q); q need not lie on the boundary."""
    check_s(s)
    if rho <= 0:
        raise InvalidParameter("rho", rho, "must be positive")
    q = np.asarray(q, dtype=float)
    on_edge = abs(float(E.level(q))) <= ON_BOUNDARY_TOL * (1.0 + float(np.linalg.norm(q)))
    integrator = PointIntegrator(E, q, cfg, r_local=max(rho, 1.0),
                                 graded=None if on_edge else False, t_start=rho)
    return integrator.truncated(s, rho)
