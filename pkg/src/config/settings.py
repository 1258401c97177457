"""
Configuration sections for fracperim.

Every numerical knob lives in one of the dataclasses below. A
`FracPerimConfig` groups them, merges overrides from dicts/JSON files and
echoes itself into every artifact so runs can be repeated from the
artifact alone.
"""

import json
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional

from src.exceptions import ConfigError

THREADS_ENV = "FRACPERIM_THREADS"


@dataclass
class QuadratureConfig:
    """Knobs of the singular-integral machinery."""

    pv_rho_schedule: Optional[List[float]] = None
    rho_levels: int = 12
    rho_ratio: float = 0.5
    rho_start_factor: float = 0.5
    tail_radius: Optional[float] = None
    rel_tol: float = 1e-6
    max_subdiv: int = 48
    angular_order: int = 8
    angular_panels: int = 16
    radial_grading: float = 1.0
    grading_ratio: float = 0.5
    azimuth_nodes: int = 32
    samples_per_decade: int = 20
    t_floor: float = 1e-13
    far_radius: float = 1e12
    crossing_iterations: int = 64
    chunk_rays: int = 2048
    mc_seed: int = 12345
    mc_samples: int = 400_000

    def rho_schedule(self, r_local: float = 1.0) -> List[float]:
        """Cutoff radii for I_s^rho, largest first."""
        if self.pv_rho_schedule is not None:
            return list(self.pv_rho_schedule)
        start = self.rho_start_factor * r_local
        return [start * self.rho_ratio ** k for k in range(self.rho_levels)]

    def validate(self, r_local: float = 1.0) -> None:
        schedule = self.rho_schedule(r_local)
        if not schedule or any(rho <= 0 for rho in schedule):
            raise ConfigError("pv_rho_schedule", "radii must be positive")
        if any(b >= a for a, b in zip(schedule, schedule[1:])):
            raise ConfigError("pv_rho_schedule", "radii must be strictly decreasing")
        if self.tail_radius is not None and self.tail_radius <= max(schedule):
            raise ConfigError("tail_radius", "must exceed every cutoff radius")
        if not 0.0 < self.rel_tol <= 1e-2:
            raise ConfigError("rel_tol", "must lie in (0, 1e-2]")
        if self.angular_order < 1 or self.angular_panels < 1:
            raise ConfigError("angular_order", "need at least one node and one panel")
        if not 0.0 < self.grading_ratio < 1.0:
            raise ConfigError("grading_ratio", "must lie in (0, 1)")
        if self.radial_grading <= 0.0:
            raise ConfigError("radial_grading", "must be positive")


@dataclass
class AlphaConfig:
    """Scan grid and direction rule for the contribution from infinity."""

    s_grid: List[float] = field(
        default_factory=lambda: [0.2 * 0.5 ** k for k in range(7)]
    )
    oscillation_tol: float = 0.02
    stabilization_fraction: float = 0.05
    angular_panels: int = 64
    angular_order: int = 8
    polar_panels: int = 32
    polar_order: int = 4
    azimuth_nodes: int = 128
    acceptance_tol: float = 0.03


@dataclass
class CurvatureConfig:
    """Graph-chart parameters for the curvature formula."""

    chart_radius: float = 0.5
    chart_height: Optional[float] = None
    max_shrinks: int = 6
    remainder_cutoff: float = 1e-3
    radial_order: int = 8
    angular_nodes: int = 64
    hessian_step: float = 1e-4
    tail_panels: int = 32
    tail_order: int = 8
    check_samples: int = 41


@dataclass
class GridConfig:
    """Rasterization of a minimization problem."""

    resolution: int = 16
    collar_cells: int = 8
    near_radius: int = 3
    tail_directions: int = 64
    tail_samples_per_decade: int = 8
    tail_decades: float = 10.0
    exhaustive_limit: int = 20
    max_cells_2d: int = 64 * 64
    max_cells_1d: int = 256


@dataclass
class AnnealConfig:
    """Simulated annealing schedule."""

    restarts: int = 8
    sweeps: int = 200
    cooling: float = 0.995
    block_size: int = 32
    seed: int = 2024
    agreement_rtol: float = 1e-9


@dataclass
class ThresholdConfig:
    """Root finding and liminf proxies."""

    tol_s: float = 1e-3
    liminf_levels: int = 4


@dataclass
class PathConfig:
    """Where artifacts go."""

    output_dir: str = "."

    def resolve(self, path: Optional[str]) -> Optional[str]:
        """Relative artifact paths land under output_dir."""
        if path is None or os.path.isabs(path):
            return path
        return os.path.join(self.output_dir, path)


_SECTIONS = ("quadrature", "alpha", "curvature", "grid", "anneal", "thresholds", "paths")


class FracPerimConfig:
    def __init__(self):
        self.quadrature = QuadratureConfig()
        self.alpha = AlphaConfig()
        self.curvature = CurvatureConfig()
        self.grid = GridConfig()
        self.anneal = AnnealConfig()
        self.thresholds = ThresholdConfig()
        self.paths = PathConfig()

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FracPerimConfig":
        cfg = cls()
        for section in _SECTIONS:
            if section not in data:
                continue
            target = getattr(cfg, section)
            known = {f.name for f in fields(target)}
            for k, v in data[section].items():
                if k not in known:
                    raise ConfigError(f"{section}.{k}", "unknown key")
                setattr(target, k, v)
        cfg.quadrature.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str) -> "FracPerimConfig":
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(path, str(e))
        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        return {section: asdict(getattr(self, section)) for section in _SECTIONS}

    @staticmethod
    def workers() -> int:
        """Worker count from the environment (1 when unset or invalid)."""
        try:
            return max(1, int(os.environ.get(THREADS_ENV, "1")))
        except ValueError:
            return 1


_config = FracPerimConfig()


def get_config() -> FracPerimConfig:
    return _config
