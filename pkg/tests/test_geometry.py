"""
Tests for the geometry layer: set algebra, domains and the example catalog.
"""

import numpy as np
import pytest

from src.exceptions import (
    DimensionMismatch, InvalidData, InvalidParameter, ThresholdExceeded, UnknownSetFamily,
)
from src.geometry.catalog import (
    canonical_set, cubic_cone_bounds, gamma_measure_in_unit_ball, parabola_cone_opening,
)
from src.geometry.domain import Domain, eroded_domain, lipschitz_violation, signed_distance
from src.geometry.graphs import flat_graph
from src.geometry.sets import (
    Ball, Complement, EmptySet, FullSet, HalfSpace, Intersection, Membership, Raster, Rotate, Scale,
    SphericalCone, Supergraph, Translate, Union, set_from_dict, set_to_dict, sphere_measure,
    spherical_cap_measure,
)


class TestMeasures:
    """Sphere and cap measures."""

    @pytest.mark.parametrize("n,expected", [(0, 0.0), (1, 2.0), (2, 2 * np.pi), (3, 4 * np.pi)])
    def test_sphere_measure(self, n, expected):
        assert sphere_measure(n) == pytest.approx(expected)

    def test_negative_dimension(self):
        with pytest.raises(InvalidParameter):
            sphere_measure(-1)

    def test_caps(self):
        assert spherical_cap_measure(2, np.pi / 4) == pytest.approx(np.pi / 2)
        assert spherical_cap_measure(3, np.pi / 2) == pytest.approx(2 * np.pi)
        assert spherical_cap_measure(4, np.pi) == pytest.approx(sphere_measure(4))
        assert spherical_cap_measure(1, np.pi) == 2.0


class TestPrimitives:
    """Membership of balls, half-spaces and cones."""

    def test_ball_membership(self, unit_ball):
        assert unit_ball.contains([0.0, 0.0]) is Membership.INSIDE
        assert unit_ball.contains([2.0, 0.0]) is Membership.OUTSIDE
        assert unit_ball.contains([1.0, 0.0]) is Membership.BOUNDARY

    def test_halfspace(self, upper_half_plane):
        assert upper_half_plane.contains([3.0, 1.0]) is Membership.INSIDE
        assert upper_half_plane.contains([3.0, -1.0]) is Membership.OUTSIDE
        assert upper_half_plane.passes_through([5.0, 0.0])

    def test_zero_normal_rejected(self):
        with pytest.raises(InvalidParameter):
            HalfSpace([0.0, 0.0])

    def test_quadrant_cone(self, quadrant):
        assert quadrant.contains([1.0, 2.0]) is Membership.INSIDE
        assert quadrant.contains([-1.0, 2.0]) is Membership.OUTSIDE
        assert quadrant.cap_measure() == pytest.approx(np.pi / 2)

    def test_octant_cap(self):
        assert canonical_set("quadrant", n=3).cap_measure() == pytest.approx(4 * np.pi / 8)

    def test_cone_needs_one_description(self):
        with pytest.raises(InvalidParameter):
            SphericalCone([0.0, 0.0])

    def test_dimension_mismatch(self, unit_ball):
        with pytest.raises(DimensionMismatch):
            unit_ball.level(np.zeros((4, 3)))

    def test_vectorized_indicator(self, unit_ball):
        X = np.array([[[0.0, 0.0], [0.5, 0.5]], [[2.0, 0.0], [0.0, -3.0]]])
        assert unit_ball.indicator(X).tolist() == [[True, True], [False, False]]

    def test_empty_and_full(self):
        assert not EmptySet(2).indicator([1.0, 1.0])
        assert FullSet(2).indicator([1e9, -1e9])

    def test_non_finite_point(self, unit_ball):
        with pytest.raises(InvalidData):
            unit_ball.contains([np.nan, 0.0])


class TestCombinators:
    """Boolean combinators and rigid motions."""

    def test_complement(self, unit_ball):
        assert Complement(unit_ball).contains([2.0, 0.0]) is Membership.INSIDE

    def test_union_intersection_difference(self, unit_ball, upper_half_plane):
        union = unit_ball | upper_half_plane
        cap = unit_ball & upper_half_plane
        diff = upper_half_plane - unit_ball
        p_low, p_high = [0.0, -0.5], [0.0, 5.0]
        assert union.indicator(p_low) and union.indicator(p_high)
        assert not cap.indicator(p_low) and not cap.indicator(p_high)
        assert diff.indicator(p_high) and not diff.indicator([0.0, 0.5])

    def test_mixed_dimensions_rejected(self, unit_ball):
        with pytest.raises(DimensionMismatch):
            Union([unit_ball, Ball([0.0, 0.0, 0.0], 1.0)])

    def test_translate_and_scale(self, unit_ball):
        assert Translate(unit_ball, [3.0, 0.0]).indicator([3.5, 0.0])
        assert Scale(unit_ball, 2.0).indicator([1.5, 0.0])
        assert Scale(unit_ball, 2.0).bounding_radius() == pytest.approx(2.0)

    def test_rotate(self, upper_half_plane):
        quarter = np.array([[0.0, -1.0], [1.0, 0.0]])
        turned = Rotate(upper_half_plane, quarter)
        assert turned.indicator([-1.0, 0.0])
        assert not turned.indicator([1.0, 0.0])

    def test_rotate_rejects_non_orthogonal(self, unit_ball):
        with pytest.raises(InvalidParameter):
            Rotate(unit_ball, [[2.0, 0.0], [0.0, 1.0]])

    def test_bounding_radius(self, unit_ball, upper_half_plane):
        assert (unit_ball & upper_half_plane).bounding_radius() == pytest.approx(1.0)
        assert (unit_ball | upper_half_plane).bounding_radius() is None


class TestRaster:
    """Occupancy grids with a fallback set."""

    def test_cells(self):
        R = Raster([[1, 0], [0, 0]], origin=[0.0, 0.0], cell=1.0)
        assert R.indicator([0.5, 0.5])
        assert not R.indicator([1.5, 0.5])
        assert not R.indicator([5.0, 5.0])

    def test_outside_fallback(self, upper_half_plane):
        R = Raster(np.zeros((2, 2)), origin=[0.0, 0.0], cell=1.0, outside=upper_half_plane)
        assert R.indicator([5.0, 5.0])
        assert not R.indicator([0.5, 0.5])

    def test_bad_cell(self):
        with pytest.raises(InvalidParameter):
            Raster([[1]], origin=[0.0, 0.0], cell=0.0)


class TestSerialization:
    """Set-spec JSON."""

    @pytest.mark.parametrize("name,params", [
        ("annulus", {}),
        ("cubic_supergraph", {}),
        ("quadrant", {"n": 3}),
        ("butterscotch_candy", {}),
        ("sigma_supergraph", {"n": 3, "k": 2.0}),
    ])
    def test_stable_round_trip(self, name, params):
        data = set_to_dict(canonical_set(name, **params))
        assert set_to_dict(set_from_dict(data)) == data

    def test_round_trip_preserves_membership(self, rng):
        E = Translate(Scale(canonical_set("dimpled_quadrant"), 1.5), [0.2, -0.1])
        F = set_from_dict(set_to_dict(E))
        X = rng.uniform(-4, 4, size=(500, 2))
        assert np.array_equal(E.indicator(X), F.indicator(X))

    def test_domain_node(self, unit_box):
        F = set_from_dict(unit_box.as_set().to_dict())
        assert F.indicator([0.0, 0.0]) and not F.indicator([2.0, 0.0])

    @pytest.mark.parametrize("data", [
        {"op": "xor", "args": []},
        {"type": "torus"},
        {"type": "ball", "center": [0.0, 0.0]},
        ["not", "an", "object"],
    ])
    def test_invalid_documents(self, data):
        with pytest.raises(InvalidData):
            set_from_dict(data)


class TestDomain:
    """Reference domains and signed distance."""

    def test_ball_domain(self, unit_disc):
        assert unit_disc.volume() == pytest.approx(np.pi)
        assert unit_disc.inradius() == 1.0
        assert signed_distance(unit_disc, [0.0, 0.0]) == pytest.approx(-1.0)
        assert signed_distance(unit_disc, [2.0, 0.0]) == pytest.approx(1.0)

    def test_box_domain(self, unit_box):
        assert unit_box.volume() == pytest.approx(4.0)
        assert signed_distance(unit_box, [0.0, 0.0]) == pytest.approx(-1.0)
        assert signed_distance(unit_box, [2.0, 2.0]) == pytest.approx(np.sqrt(2.0))

    def test_vectorized(self, unit_disc):
        d = signed_distance(unit_disc, np.zeros((3, 5, 2)))
        assert d.shape == (3, 5)

    def test_invalid(self):
        with pytest.raises(InvalidParameter):
            Domain.ball((0.0, 0.0), -1.0)
        with pytest.raises(InvalidParameter):
            Domain.ball((0.0, 0.0), 1.0, r0=2.0)
        with pytest.raises(InvalidParameter):
            Domain.box((0.0, 0.0), (1.0, -1.0))

    def test_dict_round_trip(self, unit_box):
        assert Domain.from_dict(unit_box.to_dict()) == unit_box

    def test_missing_field(self):
        with pytest.raises(InvalidData):
            Domain.from_dict({"shape": "ball", "n": 2})

    def test_erosion(self, unit_disc):
        inner = eroded_domain(unit_disc, -0.5)
        assert inner.radius == pytest.approx(0.5)
        assert inner.r0 == pytest.approx(0.5)
        outer = eroded_domain(unit_disc, 0.5)
        assert signed_distance(outer, [1.4, 0.0]) < 0.0

    def test_box_erosion_and_dilation(self, unit_box):
        grown = eroded_domain(unit_box, 0.25)
        assert grown.offset == pytest.approx(0.25)
        assert grown.volume() == pytest.approx(4.0 + 4 * 0.25 * 2.0 + np.pi * 0.0625)
        shrunk = eroded_domain(unit_box, -0.5)
        assert shrunk.half_widths == (0.5, 0.5)

    def test_erosion_band(self, unit_disc):
        with pytest.raises(ThresholdExceeded):
            eroded_domain(unit_disc, -2.0)

    def test_signed_distance_is_lipschitz(self, unit_box):
        assert lipschitz_violation(unit_box) <= 1.0 + 1e-9


class TestCatalog:
    """Named example sets."""

    def test_unknown_family(self):
        with pytest.raises(UnknownSetFamily):
            canonical_set("dodecahedron")

    def test_bad_keyword(self):
        with pytest.raises(InvalidParameter):
            canonical_set("ball", bogus=1)

    def test_annulus(self):
        A = canonical_set("annulus")
        assert A.indicator([1.5, 0.0]) and not A.indicator([0.5, 0.0]) and not A.indicator([2.5, 0.0])
        with pytest.raises(InvalidParameter):
            canonical_set("annulus", inner=2.0, outer=1.0)

    def test_supergraphs(self):
        cubic = canonical_set("cubic_supergraph")
        assert cubic.indicator([0.0, 1.0]) and not cubic.indicator([1.0, 0.5])
        assert cubic.indicator([-1.0, -0.5])
        parabola = canonical_set("parabola_supergraph")
        assert parabola.indicator([0.0, 0.5]) and not parabola.indicator([1.0, 0.5])

    def test_candy_is_a_band(self):
        candy = canonical_set("butterscotch_candy")
        assert candy.indicator([0.0, 0.0])
        assert not candy.indicator([0.0, 5.0]) and not candy.indicator([0.0, -5.0])

    def test_dimpled_quadrant(self):
        E = canonical_set("dimpled_quadrant")
        assert not E.indicator([2.0, 0.2])
        assert E.indicator([2.0, 1.0])

    def test_sigma_needs_low_dimension(self):
        with pytest.raises(InvalidParameter):
            canonical_set("sigma_supergraph", n=4)

    def test_gamma_sets(self):
        G = canonical_set("gamma_k_eps", k=1, eps=0.1)
        assert G.indicator([0.0, 0.0]) and G.indicator([0.55, 0.0]) and not G.indicator([0.3, 0.0])
        assert gamma_measure_in_unit_ball(2, 1, 0.1) == pytest.approx(0.4 * np.pi)
        with pytest.raises(InvalidParameter):
            canonical_set("gamma_k_eps", k=1, eps=0.3)

    def test_parabola_cone_opening_shrinks(self):
        near, far = parabola_cone_opening(1.0), parabola_cone_opening(10.0)
        assert 0.0 < far < near < 2 * np.pi

    def test_cubic_cone_bounds_bracket_pi(self):
        lo, hi = cubic_cone_bounds(10.0)
        assert lo < np.pi < hi
        assert lo + hi == pytest.approx(2 * np.pi)
        lo_far, hi_far = cubic_cone_bounds(100.0)
        assert hi_far - lo_far < hi - lo


def composite():
    """Disc plus a half-plane with a hole, away from any symmetry."""
    return (Ball((0.3, -0.2), 1.0) | HalfSpace((1.0, 1.0), 0.5)) - Ball((2.0, 0.0), 0.4)


class TestSetProperties:
    """Membership identities over many random points."""

    @pytest.fixture
    def points(self, rng):
        X = rng.uniform(-4.0, 4.0, size=(10_000, 2))
        # drop the measure-zero band where rounding could flip a sign
        return X[np.abs(composite().level(X)) > 1e-9]

    def test_complement_involution(self, points):
        E = composite()
        inside = E.indicator(points)
        assert np.array_equal(Complement(Complement(E)).indicator(points), inside)
        assert np.array_equal(Complement(E).indicator(points), ~inside)

    def test_de_morgan(self, points, unit_ball, upper_half_plane):
        lhs = Complement(unit_ball | upper_half_plane).indicator(points)
        rhs = (Complement(unit_ball) & Complement(upper_half_plane)).indicator(points)
        assert np.array_equal(lhs, rhs)

    def test_translate(self, points):
        v = np.array([0.7, -1.3])
        E = composite()
        assert np.array_equal(Translate(E, v).indicator(points + v), E.indicator(points))

    def test_rotate(self, points):
        a = 0.7
        R = np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
        E = composite()
        assert np.array_equal(Rotate(E, R).indicator(points @ R.T), E.indicator(points))

    @pytest.mark.parametrize("factor", [0.25, 3.0])
    def test_scale(self, points, factor):
        E = composite()
        assert np.array_equal(Scale(E, factor).indicator(factor * points), E.indicator(points))


class TestRayBreaks:
    """Boundary hits along q + t (1, 0)."""

    @pytest.mark.parametrize("E,q,expected", [
        (Ball((2.0, 0.0), 1.0), (0.0, 0.0), [1.0, 3.0]),
        (Translate(Ball((0.0, 0.0), 1.0), (2.0, 0.0)), (0.0, 0.0), [1.0, 3.0]),
        (Rotate(Ball((0.0, 2.0), 1.0), [[0.0, 1.0], [-1.0, 0.0]]), (0.0, 0.0), [1.0, 3.0]),
        (Scale(Ball((1.0, 0.0), 0.5), 2.0), (0.0, 0.0), [1.0, 3.0]),
        (Complement(HalfSpace((1.0, 0.0), 1.5)), (0.0, 0.0), [1.5]),
        (canonical_set("quadrant"), (-1.0, 0.5), [1.0]),
        (Raster([[1], [0]], origin=[0.5, 0.0], cell=1.0), (0.0, 0.5), [0.5, 1.5, 2.5]),
        (Supergraph(flat_graph(1)), (0.0, 1.0), []),
    ])
    def test_hits(self, E, q, expected):
        breaks = E.ray_breaks(np.asarray(q), np.array([[1.0, 0.0]]))
        assert breaks.shape[0] == 1
        assert sorted(t for t in breaks[0] if np.isfinite(t)) == pytest.approx(expected)

    def test_union_collects_every_part(self):
        shell = Ball((0.0, 0.0), 1.1) - Ball((0.0, 0.0), 1.0)
        D = np.array([[1.0, 0.0], [0.0, -1.0], [0.6, 0.8]])
        breaks = (shell | Ball((5.0, 0.0), 1.0)).ray_breaks(np.zeros(2), D)
        hits = [sorted(t for t in row if np.isfinite(t)) for row in breaks]
        assert hits[0] == pytest.approx([1.0, 1.1, 4.0, 6.0])
        assert hits[1] == pytest.approx([1.0, 1.1])
