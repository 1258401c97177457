from .settings import (
    get_config,
    FracPerimConfig,
    QuadratureConfig,
    AlphaConfig,
    CurvatureConfig,
    GridConfig,
    AnnealConfig,
    ThresholdConfig,
    PathConfig,
)

__all__ = [
    "get_config",
    "FracPerimConfig",
    "QuadratureConfig",
    "AlphaConfig",
    "CurvatureConfig",
    "GridConfig",
    "AnnealConfig",
    "ThresholdConfig",
    "PathConfig",
]
