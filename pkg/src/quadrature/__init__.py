"""
Singular-integral machinery: kernels, direction rules, ray structures,
principal values, tails and Monte-Carlo oracles.
"""

from src.quadrature.kernels import g_kernel, G_kernel, G_infinity, G_kernel_quad
from src.quadrature.directions import DirectionRule, uniform_rule, boundary_rule, gauss_on
from src.quadrature.rays import RayStructure, trace_rays
from src.quadrature.pv import (
    PVResult, PointIntegrator, pv_curvature_integral, curvature_truncated, assert_on_boundary,
)
from src.quadrature.tail import TailResult, tail_integral, tail_estimate, closed_form_tail
from src.quadrature.montecarlo import (
    MonteCarloEstimate, mc_truncated_curvature, disk_boundary_curvature, quadrant_edge_curvature,
)

__all__ = [
    'g_kernel', 'G_kernel', 'G_infinity', 'G_kernel_quad',
    'DirectionRule', 'uniform_rule', 'boundary_rule', 'gauss_on',
    'RayStructure', 'trace_rays',
    'PVResult', 'PointIntegrator', 'pv_curvature_integral', 'curvature_truncated', 'assert_on_boundary',
    'TailResult', 'tail_integral', 'tail_estimate', 'closed_form_tail',
    'MonteCarloEstimate', 'mc_truncated_curvature', 'disk_boundary_curvature', 'quadrant_edge_curvature',
]
