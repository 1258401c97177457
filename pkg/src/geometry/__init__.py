"""
Geometry layer: set algebra, graph functions, reference domains and the example catalog.
"""

from src.geometry.sets import (
    Membership, SetSpec, HalfSpace, Ball, SphericalCone, Supergraph, Raster, EmptySet, FullSet,
    Complement, Union, Intersection, Translate, Rotate, Scale,
    set_to_dict, set_from_dict, sphere_measure, spherical_cap_measure,
)
from src.geometry.graphs import GraphFunction, GrowthTag, graph_from_dict, graph_to_dict
from src.geometry.domain import Domain, signed_distance, eroded_domain, lipschitz_violation
from src.geometry.catalog import (
    canonical_set, gamma_measure_in_unit_ball, parabola_cone_opening, cubic_cone_bounds,
)

__all__ = [
    'Membership', 'SetSpec', 'HalfSpace', 'Ball', 'SphericalCone', 'Supergraph', 'Raster',
    'EmptySet', 'FullSet', 'Complement', 'Union', 'Intersection', 'Translate', 'Rotate', 'Scale',
    'set_to_dict', 'set_from_dict', 'sphere_measure', 'spherical_cap_measure',
    'GraphFunction', 'GrowthTag', 'graph_from_dict', 'graph_to_dict',
    'Domain', 'signed_distance', 'eroded_domain', 'lipschitz_violation',
    'canonical_set', 'gamma_measure_in_unit_ball', 'parabola_cone_opening', 'cubic_cone_bounds',
]
