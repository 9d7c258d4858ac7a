# test_ffpe.py
"""Aged fractional Fokker-Planck solver and its reference routes"""

import math

import numpy as np
import pytest
from scipy import special

from aging_ctrw.analysis import ffpe
from aging_ctrw.analysis.ffpe import GridDensity, InitialDensity
from aging_ctrw.exceptions import DomainError, InstabilityError, UnsupportedFamilyError
from aging_ctrw.laws.dist import AgingKernel
from aging_ctrw.laws.special_fn import AlphaScale
from aging_ctrw.simulation.process import LevyFamily

BROWNIAN = LevyFamily.brownian()


@pytest.fixture
def grid():
    return ffpe.make_x_grid(0.2, 8.0)


@pytest.fixture
def initial(grid):
    return InitialDensity.narrow_gaussian(grid, 0.05)


class TestGrids:
    def test_grid_is_odd_and_centred(self, grid):
        assert grid.size == 81
        assert grid[40] == 0.0
        assert grid[0] == pytest.approx(-8.0)

    def test_grid_validation(self):
        with pytest.raises(DomainError):
            ffpe.make_x_grid(0.0, 1.0)
        with pytest.raises(DomainError):
            InitialDensity(np.linspace(0.0, 1.0, 4), np.ones(4))

    def test_initial_density_has_unit_mass(self, initial):
        assert initial.p.sum() * initial.dx == pytest.approx(1.0, abs=1e-12)
        assert initial.p.argmax() == 40

    def test_initial_density_sampler(self, initial, rng):
        n = 10_000
        draws = initial.sample(rng, n)
        centre = initial.p[40] * initial.dx
        assert abs(np.mean(np.abs(draws) < 0.1) - centre) <= 4.0 * math.sqrt(centre * (1.0 - centre) / n)
        assert np.all(np.abs(draws) < 0.5)


class TestReferenceRoutes:
    def test_unaged_density(self):
        grid = ffpe.make_x_grid(0.1, 12.0)
        ref = ffpe.reference_density(BROWNIAN, AlphaScale(0.5), 1.0, grid)
        np.testing.assert_allclose(ref.values[0], ref.values[0][::-1], atol=1e-12)
        assert ref.mass()[0] == pytest.approx(1.0, abs=1e-6)
        second_moment = (grid ** 2 * ref.values[0]).sum() * ref.dx
        expected = 1.0 / special.gamma(1.5)
        assert second_moment == pytest.approx(expected, rel=5e-3)

    def test_near_stationary_alpha_is_gaussian(self):
        grid = ffpe.make_x_grid(0.1, 8.0)
        ref = ffpe.reference_density(BROWNIAN, AlphaScale(0.99), 1.0, grid)
        edges = ref.edges
        gaussian = np.diff(special.ndtr(edges)) / ref.dx
        assert np.abs(ref.values[0] - gaussian).sum() * ref.dx <= 0.02

    def test_aged_density_splits_atom(self, grid):
        aged = ffpe.aged_density(BROWNIAN, AlphaScale(0.5), 1.0, 1.0, grid)
        assert aged.atom_mass[0] == pytest.approx(0.5, abs=1e-12)
        assert aged.values[0].sum() * aged.dx == pytest.approx(0.5, abs=1e-4)

    def test_small_age_recovers_reference(self, grid):
        params = AlphaScale(0.8)
        aged = ffpe.aged_density(BROWNIAN, params, 1e-4, 1.0, grid)
        ref = ffpe.reference_density(BROWNIAN, params, 1.0, grid)
        assert aged.l1_distance(ref) <= 5e-3

    def test_zero_age_is_reference(self, grid):
        params = AlphaScale(0.5)
        aged = ffpe.aged_density(BROWNIAN, params, 0.0, 1.0, grid)
        ref = ffpe.reference_density(BROWNIAN, params, 1.0, grid)
        assert aged.l1_distance(ref) == 0.0

    def test_lattice_family_rejected(self, grid):
        with pytest.raises(UnsupportedFamilyError):
            ffpe.reference_density(LevyFamily.poisson(1.0), AlphaScale(0.5), 1.0, grid)

    def test_convolution_keeps_mass(self, initial):
        conv = ffpe.convolution_route(BROWNIAN, AlphaScale(0.5), 1.0, initial, 1.0)
        assert conv.atom_mass[0] == 0.0
        assert conv.mass()[0] == pytest.approx(1.0, abs=1e-4)

    def test_histogram_route(self, initial, seed):
        conv = ffpe.convolution_route(BROWNIAN, AlphaScale(0.5), 1.0, initial, 1.0)
        hist = ffpe.mc_histogram_route(BROWNIAN, AlphaScale(0.5), 1.0, initial, 1.0, 200_000, seed)
        assert hist.l1_distance(conv) <= 0.05


class TestGenerator:
    def test_brownian_columns_conserve_mass_inside(self, grid):
        gen = ffpe.generator_matrix(BROWNIAN, grid)
        np.testing.assert_allclose(gen.sum(axis=0)[1:-1], 0.0, atol=1e-10)
        assert np.all(np.diag(gen) < 0.0)

    def test_drift_breaks_symmetry(self, grid):
        gen = ffpe.generator_matrix(LevyFamily.brownian(mu=1.0), grid)
        assert not np.allclose(gen, gen.T)

    @pytest.mark.parametrize("beta", [0.7, 1.5])
    def test_stable_generator(self, grid, beta):
        gen = ffpe.generator_matrix(LevyFamily.symmetric_stable(beta), grid)
        np.testing.assert_allclose(gen, gen.T, atol=1e-12)
        assert np.all(np.diag(gen) < 0.0)
        off = gen - np.diag(np.diag(gen))
        assert np.all(off >= -1e-12)

    def test_cauchy_generator_rejected(self, grid):
        with pytest.raises(UnsupportedFamilyError):
            ffpe.generator_matrix(LevyFamily.symmetric_stable(1.0), grid)

    def test_stable_time_step(self, grid):
        params = AlphaScale(0.8)
        h = ffpe.stable_time_step(BROWNIAN, params, grid)
        bound = ffpe.spectral_bound(ffpe.generator_matrix(BROWNIAN, grid))
        assert bound == pytest.approx(50.0)
        assert h ** 0.8 * bound == pytest.approx(2.0 ** 0.8 * 0.9, rel=1e-12)


class TestSolver:
    def test_aged_solution_matches_convolution(self, initial):
        params = AlphaScale(0.8)
        solved = ffpe.solve_ffpe(BROWNIAN, params, 1.0, initial, 1.0, dt=0.0025)
        conv = ffpe.convolution_route(BROWNIAN, params, 1.0, initial, 1.0)
        assert solved.l1_distance(conv) <= 0.03

    def test_refinement_reduces_error(self):
        params = AlphaScale(0.8)
        errors = []
        for dx in (0.4, 0.2):
            start = InitialDensity.narrow_gaussian(ffpe.make_x_grid(dx, 8.0), 0.05)
            h = ffpe.stable_time_step(BROWNIAN, params, start.x_grid)
            solved = ffpe.solve_ffpe(BROWNIAN, params, 1.0, start, 1.0, dt=0.5 * h)
            errors.append(solved.l1_distance(ffpe.convolution_route(BROWNIAN, params, 1.0, start, 1.0)))
        assert errors[1] < errors[0]

    def test_mass_is_conserved(self, initial):
        solved = ffpe.solve_ffpe(BROWNIAN, AlphaScale(0.5), 0.0, initial, 1.0, store_every=1)
        assert np.max(np.abs(solved.mass() - 1.0)) <= 1e-3
        assert solved.t_grid[0] == 0.0
        assert solved.t_grid[-1] == pytest.approx(1.0)

    def test_store_every_keeps_final_time(self, initial):
        solved = ffpe.solve_ffpe(BROWNIAN, AlphaScale(0.8), 1.0, initial, 1.0, dt=0.01, store_every=30)
        assert solved.t_grid[-1] == pytest.approx(1.0)
        assert solved.meta['steps'] == 100

    def test_oversized_step_raises(self, initial):
        with pytest.raises(InstabilityError) as info:
            ffpe.solve_ffpe(BROWNIAN, AlphaScale(0.8), 1.0, initial, 2.0, dt=0.5)
        assert 0.0 < info.value.suggested_dt < 0.5

    def test_source_tail(self):
        t = np.array([0.5, 1.0, 4.0])
        np.testing.assert_allclose(ffpe.source_tail(0.5, 1.0, t), AgingKernel(0.5, 1.0).survival(t))
        assert ffpe.source_tail(0.5, 1.0, 1.0) == pytest.approx(0.5, abs=1e-12)
        np.testing.assert_array_equal(ffpe.source_tail(0.5, 0.0, t), 0.0)


TRANSFORM_GRID = [(k, s) for k in (0.5, 1.0, 2.0) for s in (0.5, 1.0, 2.0)]


class TestFourierLaplace:
    def test_closed_form_value(self):
        value = ffpe.flt_closed_form(BROWNIAN, AlphaScale(0.5), 1.0, 1.0)
        assert value == pytest.approx(complex(1.0 / 1.5, 0.0), rel=1e-12)

    def test_zero_frequency_is_normalization(self):
        residual = ffpe.flt_residual(BROWNIAN, AlphaScale(0.5), 0.0, 1.0)
        assert abs(residual) <= 1e-3

    @pytest.mark.parametrize("k, s", TRANSFORM_GRID)
    def test_unaged_residual(self, k, s):
        assert abs(ffpe.flt_residual(BROWNIAN, AlphaScale(0.5), k, s)) <= 5e-3

    @pytest.mark.parametrize("k, s", TRANSFORM_GRID)
    def test_aged_residual(self, k, s):
        assert abs(ffpe.flt_residual(BROWNIAN, AlphaScale(0.5), k, s, t0=1.0)) <= 5e-3

    def test_trajectory_is_gridded_and_cached(self):
        trajectory = ffpe.flt_trajectory(BROWNIAN, AlphaScale(0.5), 0.0)
        assert trajectory is ffpe.flt_trajectory(BROWNIAN, AlphaScale(0.5), 0.0)
        assert trajectory.dx == pytest.approx(ffpe.FLT_DX)
        assert np.all(trajectory.t_grid > 0.0)
        early = trajectory.t_grid <= 10.0
        assert np.all(np.abs(trajectory.mass()[early] - 1.0) <= 1e-3)

    def test_coarse_grid_is_detected(self):
        residual = ffpe.flt_residual(BROWNIAN, AlphaScale(0.5), 2.0, 0.5, x_max=1.0)
        assert abs(residual) > 5e-3

    def test_laplace_of_constant(self):
        trajectory = ffpe.flt_trajectory(BROWNIAN, AlphaScale(0.5), 0.0)
        for s in (0.5, 2.0):
            assert ffpe.flt_numeric(trajectory, 0.0, s).real == pytest.approx(1.0 / s, rel=1e-3)

    def test_rejects_nonpositive_s(self):
        with pytest.raises(DomainError):
            ffpe.flt_residual(BROWNIAN, AlphaScale(0.5), 1.0, 0.0)

    def test_lattice_family_rejected(self):
        with pytest.raises(UnsupportedFamilyError):
            ffpe.flt_residual(LevyFamily.poisson(1.0), AlphaScale(0.5), 1.0, 1.0)


class TestDensityFiles:
    def test_binary_round_trip(self, grid, tmp_path):
        aged = ffpe.aged_density(BROWNIAN, AlphaScale(0.5), 1.0, 1.0, grid)
        path = tmp_path / "density.bin"
        aged.to_binary(path)
        assert path.read_bytes()[:4] == b'AGDN'
        loaded = GridDensity.from_binary(path)
        np.testing.assert_array_equal(loaded.values, aged.values)
        np.testing.assert_array_equal(loaded.atom_mass, aged.atom_mass)

    def test_binary_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b'XXXX' + bytes(32))
        with pytest.raises(DomainError):
            GridDensity.from_binary(path)

    def test_csv_round_trip(self, grid, tmp_path):
        aged = ffpe.aged_density(BROWNIAN, AlphaScale(0.5), 1.0, 1.0, grid)
        path = tmp_path / "density.csv"
        aged.to_csv(path, header_comment="scenario_hash=abc,seed=1")
        assert path.read_text(encoding='utf-8').startswith("# scenario_hash=abc,seed=1\nx,t,value\n")
        loaded = GridDensity.from_csv(path)
        np.testing.assert_allclose(loaded.values, aged.values, rtol=1e-15)
        assert loaded.atom_mass[0] == pytest.approx(aged.atom_mass[0], rel=1e-15)
        np.testing.assert_allclose(loaded.x_grid, grid, rtol=1e-15)

    def test_shape_validation(self, grid):
        with pytest.raises(DomainError):
            GridDensity(grid, [1.0], np.zeros((2, grid.size)))


def test_two_route_report(initial, seed):
    solved, distances = ffpe.two_route_report(BROWNIAN, AlphaScale(0.8), 1.0, initial, 1.0,
                                              n_mc=100_000, seed=seed, dt=0.0025)
    assert distances['solver_vs_convolution'] <= 0.03
    assert distances['convolution_vs_monte_carlo'] <= 0.06
    assert distances['solver_mass_deviation'] <= 1e-3
    assert solved.t_grid.size == 2
    assert math.isclose(distances['dt'], 0.0025, rel_tol=1e-9)
