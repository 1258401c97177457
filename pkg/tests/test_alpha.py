"""
Tests for the contribution from infinity and its calculus.
"""

import numpy as np
import pytest

from src.alpha import (
    alpha_calculus_check, alpha_limit, alpha_s, closed_form_alpha, complement_duality_check,
    extrapolate_to_one, extrapolate_to_zero, mu_bar_check, stabilization_check,
)
from src.alpha.alpha import cone_bounds
from src.alpha.extrapolation import detect_oscillation, richardson_linear
from src.exceptions import HypothesisViolated, InvalidParameter
from src.geometry.catalog import canonical_set, cubic_cone_bounds
from src.geometry.graphs import parabola_graph
from src.geometry.sets import Complement, EmptySet, HalfSpace, Supergraph, Translate


class TestExtrapolation:
    """Limits of scaled sequences."""

    def test_richardson_on_a_line(self):
        assert richardson_linear(0.2, 3.4, 0.1, 3.2) == pytest.approx(3.0)

    def test_richardson_needs_distinct_nodes(self):
        with pytest.raises(InvalidParameter):
            richardson_linear(0.1, 1.0, 0.1, 2.0)

    def test_linear_sequence_is_exact(self):
        grid = [0.2, 0.1, 0.05, 0.025]
        ext = extrapolate_to_zero(grid, [1.5 - 2.0 * s for s in grid])
        assert ext.limit == pytest.approx(1.5)
        assert ext.error_bar == pytest.approx(0.0, abs=1e-12)
        assert not ext.oscillating and ext.split is None

    @pytest.mark.parametrize("grid,values", [
        ([0.1, 0.2], [1.0, 1.0]),
        ([0.2, 0.1], [1.0]),
        ([0.2], [1.0]),
        ([0.2, -0.1], [1.0, 1.0]),
    ])
    def test_invalid_grids(self, grid, values):
        with pytest.raises(InvalidParameter):
            extrapolate_to_zero(grid, values)

    def test_oscillation_reports_split(self):
        grid = [0.5 ** k for k in range(1, 9)]
        values = [1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0]
        assert detect_oscillation(values, 0.1)
        ext = extrapolate_to_zero(grid, values, 0.1)
        assert ext.oscillating
        assert ext.split == (2.0, 1.0)
        assert ext.limit == pytest.approx(1.5)
        assert ext.error_bar == pytest.approx(0.5)

    def test_small_wiggles_ignored(self):
        assert not detect_oscillation([1.0, 1.001, 1.0, 1.001, 1.0], 0.01)

    def test_extrapolate_to_one(self):
        s = [0.75, 0.8, 0.85, 0.9, 0.95]
        limit, spread = extrapolate_to_one(s, [2.0 + 3.0 * (1 - x) for x in s])
        assert limit == pytest.approx(2.0)
        assert spread == pytest.approx(0.0, abs=1e-9)


class TestAlphaS:
    """alpha_s at finite s."""

    def test_halfspace_through_center(self, upper_half_plane):
        assert alpha_s(upper_half_plane, [0.0, 0.0], 2.0, 0.3) == pytest.approx(np.pi * 2.0 ** -0.3 / 0.3)

    def test_bounded_set_inside_ball(self, unit_ball):
        assert alpha_s(unit_ball, [0.0, 0.0], 1.0, 0.5) == 0.0

    @pytest.mark.parametrize("s", [0.1, 0.5])
    def test_annular_shell(self, unit_ball, s):
        expected = 2 * np.pi * (0.5 ** (-s) - 1.0) / s
        assert alpha_s(unit_ball, [0.0, 0.0], 0.5, s) == pytest.approx(expected, rel=1e-9)

    def test_nonnegative(self, rng):
        E = canonical_set("cubic_supergraph")
        for _ in range(3):
            assert alpha_s(E, rng.uniform(-1, 1, size=2), 1.0, 0.2) >= 0.0

    @pytest.mark.parametrize("r,s", [(0.0, 0.5), (1.0, 0.0), (1.0, 1.0)])
    def test_invalid(self, upper_half_plane, r, s):
        with pytest.raises(InvalidParameter):
            alpha_s(upper_half_plane, [0.0, 0.0], r, s)


class TestClosedForms:
    """alpha(E) for the families with a known value."""

    @pytest.mark.parametrize("E,value,family", [
        (EmptySet(2), 0.0, "empty"),
        (HalfSpace((1.0, 2.0)), np.pi, "halfspace"),
        (Translate(HalfSpace((0.0, 1.0)), (3.0, 1.0)), np.pi, "halfspace"),
        (canonical_set("quadrant"), np.pi / 2, "cone"),
        (Complement(canonical_set("quadrant")), 3 * np.pi / 2, "complement(cone)"),
        (canonical_set("annulus"), 0.0, "bounded"),
        (canonical_set("gamma_k_eps"), 0.0, "bounded"),
        (canonical_set("cubic_supergraph"), np.pi, "cubic_like"),
        (canonical_set("sublinear_supergraph"), np.pi, "sublinear"),
        (canonical_set("butterscotch_candy"), 0.0, "strip"),
        (Supergraph(parabola_graph(1, 1.0)), 0.0, "superlinear"),
        (Supergraph(parabola_graph(1, -1.0)), 2 * np.pi, "superlinear"),
        (Supergraph(parabola_graph(1, 0.0)), np.pi, "bounded"),
    ])
    def test_families(self, E, value, family):
        assert closed_form_alpha(E) == (pytest.approx(value), family)

    def test_linear_cone(self):
        value, family = closed_form_alpha(canonical_set("sigma_supergraph", n=3, k=1.0))
        assert family == "linear_cone"
        assert value == pytest.approx(2 * np.pi - (np.pi / 2) / np.sqrt(2.0))

    def test_cone_bounds(self):
        assert cone_bounds(canonical_set("cubic_supergraph")) == cubic_cone_bounds(100.0)
        lo, hi = cone_bounds(canonical_set("parabola_supergraph"))
        assert lo == 0.0 and 0.0 < hi < 0.5
        assert cone_bounds(canonical_set("quadrant")) is None


class TestAlphaLimit:
    """Extrapolation of s alpha_s to s = 0."""

    def test_halfspace(self, upper_half_plane):
        est = alpha_limit(upper_half_plane)
        assert est.extrapolated_limit == pytest.approx(np.pi, rel=1e-2)
        assert est.family == "halfspace"
        assert est.agrees(0.03 * np.pi)

    def test_quadrant_is_exact_at_apex(self, quadrant):
        est = alpha_limit(quadrant)
        assert est.scaled_values == pytest.approx([np.pi / 2] * len(est.s_grid))
        assert est.extrapolated_limit == pytest.approx(np.pi / 2)

    def test_bounded(self, unit_ball):
        est = alpha_limit(unit_ball)
        assert est.extrapolated_limit == 0.0
        assert est.closed_form == 0.0

    def test_cubic_supergraph(self):
        est = alpha_limit(canonical_set("cubic_supergraph"))
        assert est.extrapolated_limit == pytest.approx(np.pi, rel=0.03)
        assert est.family == "cubic_like"
        assert est.bounds is not None

    def test_custom_grid_and_rows(self, upper_half_plane):
        est = alpha_limit(upper_half_plane, q=[0.0, 0.5], r=2.0, s_grid=[0.1, 0.05, 0.025])
        rows = est.csv_rows()
        assert [row[0] for row in rows] == [0.1, 0.05, 0.025]
        assert all(row[3] == pytest.approx(np.pi) for row in rows)
        data = est.to_dict()
        assert data["q"] == [0.0, 0.5] and data["r"] == 2.0
        assert data["family"] == "halfspace"

    def test_invalid_grid_value(self, upper_half_plane):
        with pytest.raises(InvalidParameter):
            alpha_limit(upper_half_plane, s_grid=[0.5, 1.5])


class TestCalculus:
    """Relations between alpha values of related sets."""

    def test_monotone(self, quadrant, upper_half_plane):
        report = alpha_calculus_check(quadrant, upper_half_plane, "monotone", samples=4)
        assert report.passed
        assert report.details["inclusion_violation"] == 0.0

    def test_monotone_detects_non_inclusion(self, quadrant, upper_half_plane):
        report = alpha_calculus_check(upper_half_plane, quadrant, "monotone", samples=2)
        assert not report.passed

    def test_scaling(self, quadrant):
        assert alpha_calculus_check(quadrant, None, "scaling", samples=4).passed

    def test_additive(self, quadrant):
        lower_half_plane = HalfSpace((0.0, -1.0), 0.0)
        report = alpha_calculus_check(quadrant, lower_half_plane, "additive", samples=4)
        assert report.passed
        assert report.details["overlap"] == 0.0

    def test_rigid_motion(self, quadrant):
        report = alpha_calculus_check(quadrant, None, "rigid_motion", samples=4)
        assert report.passed
        assert report.max_violation <= 1e-3

    def test_symmetric_difference(self, quadrant, upper_half_plane):
        assert alpha_calculus_check(quadrant, upper_half_plane, "symm_diff", samples=4).passed

    def test_unknown_relation(self, quadrant):
        with pytest.raises(InvalidParameter):
            alpha_calculus_check(quadrant, None, "transitive")

    def test_second_set_required(self, quadrant):
        with pytest.raises(InvalidParameter):
            alpha_calculus_check(quadrant, None, "additive")

    def test_complement_duality(self, quadrant):
        report = complement_duality_check(quadrant)
        assert report.passed
        assert report.details["omega"] == pytest.approx(2 * np.pi)

    def test_stabilization(self, upper_half_plane):
        probes = [((0.0, 0.0), 1.0), ((0.5, 0.3), 2.0)]
        report = stabilization_check(upper_half_plane, probes)
        assert report.passed
        assert len(report.details["differences"]) == len(report.details["s_grid"])

    def test_stabilization_needs_two_probes(self, upper_half_plane):
        with pytest.raises(InvalidParameter):
            stabilization_check(upper_half_plane, [((0.0, 0.0), 1.0)])

    def test_mu_bar_rejects_overlapping_exterior(self, upper_half_plane, unit_disc):
        with pytest.raises(HypothesisViolated):
            mu_bar_check(upper_half_plane, unit_disc)
