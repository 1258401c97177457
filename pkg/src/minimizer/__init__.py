"""
Discrete fractional perimeter with exterior data: rasterization, solvers, checkers and sweeps.
"""

from src.minimizer.grid import (
    GridLayout, GridProblem, build_layout, build_problem, problem_from_layout, omega_overlap,
)
from src.minimizer.energy import (
    discrete_perimeter, empty_state_energy, flip_delta, flip_deltas, apply_flip,
)
from src.minimizer.solvers import MinimizeResult, minimize, exhaustive, anneal, is_local_minimum
from src.minimizer.checks import (
    DenseResult, is_delta_dense, density_estimate_check, maximum_principle_check,
    euler_lagrange_report,
)
from src.minimizer.sweep import Preset, PRESETS, PhaseRow, PhaseTable, get_preset, stickiness_sweep

__all__ = [
    'GridLayout', 'GridProblem', 'build_layout', 'build_problem', 'problem_from_layout', 'omega_overlap',
    'discrete_perimeter', 'empty_state_energy', 'flip_delta', 'flip_deltas', 'apply_flip',
    'MinimizeResult', 'minimize', 'exhaustive', 'anneal', 'is_local_minimum',
    'DenseResult', 'is_delta_dense', 'density_estimate_check', 'maximum_principle_check',
    'euler_lagrange_report',
    'Preset', 'PRESETS', 'PhaseRow', 'PhaseTable', 'get_preset', 'stickiness_sweep',
]
