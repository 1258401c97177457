"""
Tests for the discrete fractional perimeter and its minimizers.
"""

import numpy as np
import pytest
from scipy import integrate

from src.config.settings import FracPerimConfig
from src.exceptions import (
    HypothesisViolated, InvalidParameter, ProblemTooLarge, ResolutionTooCoarse,
)
from src.geometry.catalog import canonical_set
from src.geometry.domain import Domain
from src.geometry.sets import Complement, EmptySet, HalfSpace
from src.minimizer import (
    MinimizeResult, PRESETS, PhaseRow, PhaseTable, Preset, apply_flip, build_layout, build_problem,
    density_estimate_check, discrete_perimeter, empty_state_energy, euler_lagrange_report, exhaustive,
    flip_delta, flip_deltas, get_preset, is_delta_dense, is_local_minimum, maximum_principle_check,
    minimize, omega_overlap, problem_from_layout, stickiness_sweep,
)
from src.minimizer.kernels import _interval_pair, box_exit, kernel_table
from src.minimizer.sweep import CLASSES


@pytest.fixture(scope="module")
def box_config():
    config = FracPerimConfig()
    config.anneal.sweeps = 60
    return config


@pytest.fixture(scope="module")
def box_domain():
    return Domain.box((-1.0, -1.0), (1.0, 1.0))


@pytest.fixture(scope="module")
def halfplane_layout(box_domain, box_config):
    """4x4 cells of the box with {x_2 < 0} outside it as exterior data."""
    E0 = HalfSpace((0.0, -1.0), 0.0) - box_domain.as_set()
    return build_layout(box_domain, E0, box_config, resolution=4)


@pytest.fixture(scope="module")
def halfplane_problem(halfplane_layout, box_config):
    return problem_from_layout(halfplane_layout, 0.5, box_config)


def mirrored(problem, state):
    """State reflected through x_1 -> -x_1."""
    centers = problem.layout.centers()
    lookup = {tuple(np.round(c, 9)): k for k, c in enumerate(centers)}
    out = np.zeros_like(state)
    for k, c in enumerate(centers):
        out[lookup[(round(-c[0], 9), round(c[1], 9))]] = state[k]
    return out


class TestKernels:
    """Cell-pair weights."""

    def test_adjacent_intervals(self):
        s = 0.4
        assert _interval_pair(np.array([1.0]), s)[0] == pytest.approx((2.0 - 2.0 ** (1 - s)) / (s * (1 - s)))

    def test_interval_pair_matches_quadrature(self):
        s = 0.6
        value, _ = integrate.dblquad(lambda y, x: (y - x) ** (-1 - s), 0.0, 1.0, 2.0, 3.0)
        assert _interval_pair(np.array([2.0]), s)[0] == pytest.approx(value, rel=1e-8)

    def test_table_shape_and_symmetry(self):
        K = kernel_table(2, 0.5, (6, 6), 0.25)
        assert K.shape == (11, 11)
        assert K[5, 5] == 0.0
        assert np.allclose(K, K[::-1, :]) and np.allclose(K, K.T)

    def test_far_entries_use_midpoint(self):
        h, s = 0.5, 0.3
        K = kernel_table(2, s, (8, 8), h, near_radius=2)
        assert K[7 + 5, 7] == pytest.approx(h ** (2 - s) * 5.0 ** (-2 - s))

    def test_one_dimensional_weights_decrease(self):
        K = kernel_table(1, 0.5, (6,), 1.0)
        near = K[6:]
        assert np.all(np.diff(near) < 0)

    def test_invalid_s(self):
        with pytest.raises(InvalidParameter):
            kernel_table(2, 1.0, (4, 4), 1.0)

    def test_box_exit(self):
        dirs = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])
        exits = box_exit(np.zeros((1, 2)), dirs, np.array([-1.0, -2.0]), np.array([1.0, 3.0]))
        assert exits.tolist() == [[1.0, 1.0, 3.0]]


class TestLayout:
    """Rasterization of Omega and the collar."""

    def test_cells(self, halfplane_layout, box_config):
        assert halfplane_layout.cell_count == 16
        assert halfplane_layout.h == pytest.approx(0.5)
        W = box_config.grid.collar_cells
        assert halfplane_layout.shape == (4 + 2 * W, 4 + 2 * W)
        assert len(halfplane_layout.tails) == 16

    def test_exterior_stays_off_omega(self, halfplane_layout):
        assert not np.any(halfplane_layout.exterior_occ & halfplane_layout.omega_mask)
        assert np.any(halfplane_layout.exterior_occ)

    def test_centers_inside_domain(self, halfplane_layout):
        centers = halfplane_layout.centers()
        assert np.all(np.abs(centers) < 1.0)

    def test_too_large(self, box_domain, cfg):
        with pytest.raises(ProblemTooLarge):
            build_layout(box_domain, EmptySet(2), cfg, resolution=100)

    def test_dimension_checks(self, box_domain, cfg):
        with pytest.raises(InvalidParameter):
            build_layout(box_domain, EmptySet(1), cfg, resolution=4)
        cube = Domain.box((-1.0,) * 3, (1.0,) * 3)
        with pytest.raises(InvalidParameter):
            build_layout(cube, EmptySet(3), cfg, resolution=2)

    def test_overlap(self, box_domain):
        assert omega_overlap(HalfSpace((0.0, -1.0), 0.0) - box_domain.as_set(), box_domain) == 0
        assert omega_overlap(HalfSpace((0.0, -1.0), 0.0), box_domain) > 0


class TestEnergy:
    """The quadratic form and its single-flip increments."""

    def test_pair_matrix(self, halfplane_problem):
        A = halfplane_problem.pair_matrix()
        assert np.allclose(A, A.T)
        assert np.all(np.diag(A) == 0.0)

    def test_empty_state(self, halfplane_problem):
        u = np.zeros(16, dtype=bool)
        assert discrete_perimeter(halfplane_problem, u) == pytest.approx(empty_state_energy(halfplane_problem))
        assert empty_state_energy(halfplane_problem) > 0.0

    def test_flip_delta_matches_recompute(self, halfplane_problem, rng):
        u = rng.integers(0, 2, 16).astype(bool)
        base = discrete_perimeter(halfplane_problem, u)
        deltas = flip_deltas(halfplane_problem, u)
        for i in (0, 5, 15):
            v = u.copy()
            v[i] = not v[i]
            change = discrete_perimeter(halfplane_problem, v) - base
            assert flip_delta(halfplane_problem, u, i) == pytest.approx(change, abs=1e-9)
            assert deltas[i] == pytest.approx(change, abs=1e-9)

    def test_incremental_updates_do_not_drift(self, halfplane_problem, rng):
        u = np.zeros(16)
        S = halfplane_problem.field(u)
        energy = discrete_perimeter(halfplane_problem, u)
        for i in rng.integers(0, 16, 500):
            energy += apply_flip(halfplane_problem, u, S, int(i))
        assert energy == pytest.approx(discrete_perimeter(halfplane_problem, u), abs=1e-9)
        assert np.allclose(S, halfplane_problem.field(u), atol=1e-9)

    def test_state_shape(self, halfplane_problem):
        with pytest.raises(InvalidParameter):
            discrete_perimeter(halfplane_problem, np.zeros(15))
        with pytest.raises(InvalidParameter):
            halfplane_problem.to_grid(np.zeros(3))

    def test_grid_and_set_views(self, halfplane_problem):
        lower = halfplane_problem.state_of(HalfSpace((0.0, -1.0), 0.0))
        assert int(lower.sum()) == 8
        E = halfplane_problem.as_set(lower)
        assert bool(E.indicator(np.array([[0.1, -0.6]]))[0])
        assert not bool(E.indicator(np.array([[0.1, 0.6]]))[0])
        assert halfplane_problem.to_dict()["cells"] == 16

    def test_mirror_invariance(self, halfplane_problem, rng):
        u = rng.integers(0, 2, 16).astype(bool)
        assert discrete_perimeter(halfplane_problem, mirrored(halfplane_problem, u)) == pytest.approx(
            discrete_perimeter(halfplane_problem, u), rel=1e-6)


class TestSolvers:
    """Exhaustive search and annealing."""

    def test_exhaustive_is_a_local_minimum(self, halfplane_problem, box_config):
        result = exhaustive(halfplane_problem, box_config)
        assert result.solver == "exhaustive"
        assert is_local_minimum(halfplane_problem, result.state)
        assert result.energy == pytest.approx(discrete_perimeter(halfplane_problem, result.state))
        assert result.trace[-1] == pytest.approx(result.energy)

    def test_exhaustive_beats_simple_states(self, halfplane_problem, box_config):
        best = exhaustive(halfplane_problem, box_config).energy
        for state in (np.zeros(16), np.ones(16), halfplane_problem.state_of(HalfSpace((0.0, -1.0), 0.0))):
            assert best <= discrete_perimeter(halfplane_problem, state) + 1e-12

    def test_optimum_is_mirror_symmetric(self, halfplane_problem, box_config):
        result = exhaustive(halfplane_problem, box_config)
        twin = mirrored(halfplane_problem, result.state)
        assert discrete_perimeter(halfplane_problem, twin) == pytest.approx(result.energy, rel=1e-6)

    def test_anneal_matches_exhaustive(self, halfplane_problem, box_config):
        exact = exhaustive(halfplane_problem, box_config)
        result = minimize(halfplane_problem, box_config, solver="anneal")
        assert result.energy == pytest.approx(exact.energy, rel=1e-9)
        assert result.restarts == box_config.anneal.restarts
        assert result.restarts_agreeing >= 7
        assert not result.low_confidence
        assert result.seeds == [box_config.anneal.seed + k for k in range(result.restarts)]

    def test_anneal_is_reproducible(self, halfplane_problem, box_config):
        a = minimize(halfplane_problem, box_config, solver="anneal", restarts=2, seed=11)
        b = minimize(halfplane_problem, box_config, solver="anneal", restarts=2, seed=11)
        assert np.array_equal(a.state, b.state)
        assert a.restart_energies == b.restart_energies

    def test_auto_uses_exhaustive_for_small_grids(self, halfplane_problem, box_config):
        assert minimize(halfplane_problem, box_config).solver == "exhaustive"

    def test_empty_exterior(self, box_domain, box_config):
        problem = build_problem(box_domain, EmptySet(2), 0.5, box_config, resolution=4)
        result = minimize(problem, box_config)
        assert result.energy == pytest.approx(0.0, abs=1e-12)
        assert not result.state.any()
        assert result.occupancy == 0.0

    def test_quadrant_exterior(self, oracle_exteriors, unit_box, fast_cfg):
        problem = build_problem(unit_box, oracle_exteriors["quadrant"], 0.5, fast_cfg, resolution=4)
        result = minimize(problem, fast_cfg, solver="anneal")
        assert result.restarts == 4
        assert is_local_minimum(problem, result.state)
        assert result.energy <= empty_state_energy(problem) + 1e-12

    @pytest.mark.parametrize("name", ["halfplane", "quadrant", "empty"])
    def test_complemented_exterior_complements_optimum(self, oracle_exteriors, unit_box, box_config, name):
        E0 = oracle_exteriors[name]
        dual_E0 = Complement(E0) - unit_box.as_set()
        primal = exhaustive(build_problem(unit_box, E0, 0.5, box_config, resolution=4), box_config)
        dual = exhaustive(build_problem(unit_box, dual_E0, 0.5, box_config, resolution=4), box_config)
        assert np.array_equal(dual.state, np.logical_not(primal.state))
        assert dual.energy == pytest.approx(primal.energy, rel=1e-9, abs=1e-12)

    def test_one_dimensional_problem(self, box_config):
        line = Domain.box((-1.0,), (1.0,))
        E0 = HalfSpace((-1.0,), 0.0) - line.as_set()
        problem = build_problem(line, E0, 0.5, box_config, resolution=8)
        result = minimize(problem, box_config)
        assert problem.cell_count == 8
        assert is_local_minimum(problem, result.state)

    def test_limits(self, halfplane_problem, box_config):
        small = FracPerimConfig()
        small.grid.exhaustive_limit = 10
        with pytest.raises(ProblemTooLarge):
            exhaustive(halfplane_problem, small)
        with pytest.raises(InvalidParameter):
            minimize(halfplane_problem, box_config, solver="gradient")
        with pytest.raises(InvalidParameter):
            minimize(halfplane_problem, box_config, solver="anneal", restarts=0)

    def test_result_dict(self):
        result = MinimizeResult(np.array([True, False]), 1.5, "exhaustive")
        data = result.to_dict()
        assert data["state"] == [1, 0]
        assert data["occupancy"] == 0.5


class TestChecks:
    """Density, maximum principle and hypothesis checks."""

    def test_dense_sets(self, unit_disc):
        assert is_delta_dense(Complement(EmptySet(2)), unit_disc, 0.3).dense
        result = is_delta_dense(HalfSpace((0.0, 1.0), 0.0), unit_disc, 0.3)
        assert not result.dense
        assert result.witness[1] < 0.0

    def test_gamma_shells_density(self, unit_disc):
        k, eps = 2, 0.05
        G = canonical_set("gamma_k_eps", k=k, eps=eps)
        assert is_delta_dense(G, unit_disc, 2.0 ** (-k + 1)).dense
        result = is_delta_dense(G, unit_disc, 2.0 ** (-k) / 8.0)
        assert not result.dense
        r = float(np.hypot(*result.witness))
        assert min(abs(r - i / 2 ** k) for i in range(2 ** k + 1)) > eps

    def test_raster_state_needs_its_problem(self, halfplane_problem, box_domain):
        u = np.ones(16, dtype=bool)
        with pytest.raises(InvalidParameter):
            is_delta_dense(u, box_domain, 0.6)
        with pytest.raises(ResolutionTooCoarse):
            is_delta_dense(u, box_domain, 0.5, problem=halfplane_problem)
        with pytest.raises(InvalidParameter):
            is_delta_dense(u, box_domain, 0.0, problem=halfplane_problem)

    def test_density_estimate(self, halfplane_problem):
        empty = MinimizeResult(np.zeros(16, dtype=bool), 0.0, "exhaustive")
        report = density_estimate_check(empty, halfplane_problem, 0.0, 0.6, 0.5)
        assert report.passed
        assert report.details["worst_ratio"] == 1.0

        full = MinimizeResult(np.ones(16, dtype=bool), 0.0, "exhaustive")
        report = density_estimate_check(full, halfplane_problem, 0.0, 0.6, 0.5)
        assert not report.passed
        assert report.details["failing_centers"] == 16

    def test_density_arguments(self, halfplane_problem):
        empty = MinimizeResult(np.zeros(16, dtype=bool), 0.0, "exhaustive")
        with pytest.raises(InvalidParameter):
            density_estimate_check(empty, halfplane_problem, 0.0, 0.6, 1.0)
        with pytest.raises(InvalidParameter):
            density_estimate_check(empty, halfplane_problem, 2 * np.pi, 0.6, 0.5)

    def test_maximum_principle(self, halfplane_problem, box_config):
        result = exhaustive(halfplane_problem, box_config)
        report = maximum_principle_check(result, halfplane_problem, (0.0, -1.0), 0.0)
        assert report.passed
        assert report.details["offending_cells"] == 0

    def test_maximum_principle_flags_occupied_cells(self, halfplane_problem):
        full = MinimizeResult(np.ones(16, dtype=bool), 0.0, "exhaustive")
        report = maximum_principle_check(full, halfplane_problem, (0.0, -1.0), 0.0)
        assert not report.passed
        assert report.details["offending_cells"] == 4

    def test_maximum_principle_hypothesis(self, halfplane_problem):
        empty = MinimizeResult(np.zeros(16, dtype=bool), 0.0, "exhaustive")
        with pytest.raises(HypothesisViolated):
            maximum_principle_check(empty, halfplane_problem, (0.0, 1.0), 0.0)

    @pytest.mark.slow
    def test_euler_lagrange_report(self, box_domain, box_config):
        E0 = HalfSpace((0.0, -1.0), 0.0) - box_domain.as_set()
        report = euler_lagrange_report(box_domain, E0, 0.5, [4], box_config)
        assert report.passed
        assert [row["resolution"] for row in report.details["rows"]] == [4]
        assert report.details["fitted_order"] is None


class TestSweep:
    """Presets and stickiness sweeps."""

    def test_presets(self):
        assert set(PRESETS) == {"quadrant-in-disc", "halfplane-in-disc", "candy", "bounded-E0"}
        for name in PRESETS:
            preset = get_preset(name)
            assert preset.name == name
            assert omega_overlap(preset.exterior, preset.omega) == 0

    def test_unknown_preset(self):
        with pytest.raises(InvalidParameter):
            get_preset("teapot")

    def test_sweep_rows(self, box_domain, box_config):
        preset = Preset("halfplane-box", box_domain, HalfSpace((0.0, -1.0), 0.0) - box_domain.as_set(),
                        np.pi, trace=HalfSpace((0.0, -1.0), 0.0), max_principle=((0.0, -1.0), 0.0))
        table = stickiness_sweep(preset, [0.3, 0.7], box_config, resolution=4)
        assert [row.s for row in table.rows] == [0.3, 0.7]
        assert all(row.classification in CLASSES for row in table.rows)
        assert all(row.delta_s is None for row in table.rows)
        assert all(row.max_principle_ok for row in table.rows)
        assert len(table.csv_rows()[0]) == len(PhaseTable.HEADER)
        assert len(table.results) == 2

    def test_monotone_in_s(self):
        def row(s, occ):
            return PhaseRow(s, occ, 0.0, "other", None, None, False, "exhaustive", 1, 1, False)

        table = PhaseTable("p", 0.0, 4, rows=[row(0.2, 0.1), row(0.5, 0.3), row(0.8, 0.4)])
        assert table.monotone_in_s()
        table.rows.append(row(0.1, 0.5))
        assert not table.monotone_in_s()
        assert table.monotone_in_s(slack=0.5)
        assert not table.low_confidence
