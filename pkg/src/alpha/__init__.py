"""
Contribution from infinity: alpha_s, its s -> 0 limit and the alpha calculus.
"""

from src.alpha.extrapolation import Extrapolation, extrapolate_to_zero, extrapolate_to_one
from src.alpha.alpha import (
    AlphaEstimate, alpha_s, alpha_limit, alpha_structure, alpha_from_structure, closed_form_alpha,
)
from src.alpha.calculus import (
    RELATIONS, alpha_calculus_check, complement_duality_check, stabilization_check, mu_bar_check,
)

__all__ = [
    'Extrapolation', 'extrapolate_to_zero', 'extrapolate_to_one',
    'AlphaEstimate', 'alpha_s', 'alpha_limit', 'alpha_structure', 'alpha_from_structure',
    'closed_form_alpha',
    'RELATIONS', 'alpha_calculus_check', 'complement_duality_check', 'stabilization_check',
    'mu_bar_check',
]
