"""
Threshold constants, the uniform positive-curvature check and the sign-change root.
"""

from src.thresholds.constants import ThresholdSet, omega, beta, delta_s
from src.thresholds.checks import RootResult, positive_curvature_check, sign_change_root, widened_config

__all__ = [
    'ThresholdSet', 'omega', 'beta', 'delta_s',
    'RootResult', 'positive_curvature_check', 'sign_change_root', 'widened_config',
]
