"""
Fractional mean curvature: graph formula, charts, scans and continuity probes.
"""

from src.curvature.graph_formula import CurvatureResult, curvature_graph, local_bound_ratio
from src.curvature.charts import Chart, local_chart, curvature_at, classical_curvature
from src.curvature.scans import ScanResult, SCAN_MODES, curvature_scan, continuity_probe
from src.quadrature.pv import curvature_truncated

__all__ = [
    'CurvatureResult', 'curvature_graph', 'local_bound_ratio',
    'Chart', 'local_chart', 'curvature_at', 'classical_curvature',
    'ScanResult', 'SCAN_MODES', 'curvature_scan', 'continuity_probe',
    'curvature_truncated',
]
