# test_aging.py
"""Aged increment laws: sets, kernel quadrature, zero atom, asymptotics, FPP mean, scaling checks"""

import math

import numpy as np
import pytest
from scipy import special

from aging_ctrw.analysis import aging
from aging_ctrw.analysis.aging import BorelSet, Interval, MarginalLaw
from aging_ctrw.exceptions import DomainError, UnsupportedFamilyError, VacuousAsymptoticsError
from aging_ctrw.laws.dist import AgingKernel
from aging_ctrw.laws.special_fn import AlphaScale
from aging_ctrw.simulation.process import LevyFamily

TAIL = BorelSet.parse("(1,inf)")


@pytest.fixture
def brownian_law():
    return MarginalLaw(LevyFamily.brownian(), AlphaScale(0.5))


@pytest.fixture
def poisson_law():
    return MarginalLaw(LevyFamily.poisson(2.0), AlphaScale(0.6))


class TestSets:
    def test_parse_union(self):
        b = BorelSet.parse("(-inf,-0.5]U[0.5,inf)")
        assert len(b.intervals) == 2
        assert b.contains(0.5) and b.contains(-0.5)
        assert not b.contains_zero

    def test_infinite_endpoints_are_open(self):
        iv = Interval.parse("[-inf,0]")
        assert iv.closed_lo is False

    def test_overlap_and_touching_rejected(self):
        with pytest.raises(DomainError):
            BorelSet.parse("(0,2] U [1,3]")
        with pytest.raises(DomainError):
            BorelSet.parse("(0,1] | [1,2]")
        assert len(BorelSet.parse("(0,1] | (1,2]").intervals) == 2

    def test_bad_intervals(self):
        with pytest.raises(DomainError):
            Interval.parse("(1,0]")
        with pytest.raises(DomainError):
            Interval.parse("1,2")

    def test_integer_bounds(self):
        assert Interval.parse("[1,2]").integer_bounds() == (2.0, 0.0)
        assert Interval.parse("(0.2,0.7]").integer_bounds() == (0.0, 0.0)
        assert Interval.parse("(1,3)").integer_bounds() == (2.0, 1.0)

    def test_vectorized_membership(self):
        mask = BorelSet.nonzero().contains(np.array([-1.0, 0.0, 2.0]))
        np.testing.assert_array_equal(mask, [True, False, True])


class TestKernelRule:
    @pytest.mark.parametrize("alpha,t,t0", [(0.5, 1.0, 1.0), (0.3, 2.0, 0.01), (0.9, 1.0, 100.0)])
    def test_weights_integrate_kernel(self, alpha, t, t0):
        _, w = aging.kernel_rule(alpha, t, t0)
        assert w.sum() == pytest.approx(float(AgingKernel(alpha, t0).cdf(t)), abs=1e-8)

    def test_power_weights(self):
        alpha, t = 0.4, 2.0
        _, w = aging.kernel_rule(alpha, t, None)
        expected = math.sin(math.pi * alpha) / math.pi * t ** (1.0 - alpha) / (1.0 - alpha)
        assert w.sum() == pytest.approx(expected, rel=1e-12)

    def test_nodes_inside_window(self):
        s, _ = aging.kernel_rule(0.5, 1.0, 1.0)
        assert np.all((s >= 0.0) & (s <= 1.0))

    def test_rejects_bad_alpha(self):
        with pytest.raises(DomainError):
            aging.kernel_rule(1.0, 1.0, 1.0)


class TestMarginalLaw:
    def test_routes_agree(self, brownian_law):
        mc = MarginalLaw(brownian_law.family, brownian_law.params, route="monte_carlo", n_mc=200_000, seed=3)
        assert mc.eval(TAIL, 1.0) == pytest.approx(brownian_law.eval(TAIL, 1.0), abs=5e-3)

    def test_vectorized_eval(self, brownian_law):
        values = brownian_law.eval(TAIL, np.array([0.0, 1.0, 4.0]))
        assert values.shape == (3,)
        assert values[0] == 0.0
        assert values[1] < values[2]

    def test_continuity(self, brownian_law):
        assert brownian_law.continuity_gap(TAIL, [0.5, 1.0, 2.0]) < 1e-4

    def test_unknown_route(self):
        with pytest.raises(DomainError):
            MarginalLaw(LevyFamily.brownian(), AlphaScale(0.5), route="exact")


class TestAgingProbability:
    def test_rejects_sets_containing_zero(self, brownian_law):
        with pytest.raises(DomainError):
            aging.aging_prob(brownian_law, BorelSet.parse("[-1,1]"), 1.0, 1.0)

    def test_rejects_zero_age(self, brownian_law):
        with pytest.raises(DomainError):
            aging.aging_prob(brownian_law, TAIL, 1.0, 0.0)

    def test_small_age_recovers_marginal(self):
        law = MarginalLaw(LevyFamily.brownian(), AlphaScale(0.8))
        aged = aging.aging_prob(law, TAIL, 1.0, 1e-4)
        assert aged == pytest.approx(law.eval(TAIL, 1.0), abs=2e-3)

    def test_brownian_mass_balance(self, brownian_law):
        off_zero = aging.aging_prob(brownian_law, BorelSet.nonzero(), 1.0, 1.0)
        atom = aging.zero_atom(brownian_law.family, 0.5, 1.0, 1.0)
        assert off_zero + atom == pytest.approx(1.0, abs=1e-6)

    def test_poisson_mass_balance(self, poisson_law):
        off_zero = aging.aging_prob(poisson_law, BorelSet.nonzero(), 1.0, 5.0)
        atom = aging.zero_atom(poisson_law.family, 0.6, 1.0, 5.0)
        assert off_zero + atom == pytest.approx(1.0, abs=1e-5)

    def test_error_estimate_is_small(self, brownian_law):
        _, error = aging.aging_prob(brownian_law, TAIL, 1.0, 10.0, return_error=True)
        assert error < 1e-6

    def test_agrees_with_renewal_sampler(self, brownian_law, seed):
        exact = aging.aging_prob(brownian_law, TAIL, 1.0, 1.0)
        p, sigma = aging.aging_prob_mc(brownian_law, TAIL, 1.0, 1.0, 100_000, seed, route="renewal")
        assert abs(p - exact) <= 4.0 * sigma

    def test_agrees_with_path_sampler(self, brownian_law, seed):
        exact = aging.aging_prob(brownian_law, TAIL, 1.0, 1.0)
        p, sigma = aging.aging_prob_mc(brownian_law, TAIL, 1.0, 1.0, 20_000, seed, route="path",
                                       batch_size=5000, threads=2)
        assert abs(p - exact) <= 4.0 * sigma + 5e-3

    def test_poisson_agrees_with_renewal_sampler(self, poisson_law, seed):
        b = BorelSet.parse("[1,inf)")
        exact = aging.aging_prob(poisson_law, b, 1.0, 5.0)
        p, sigma = aging.aging_prob_mc(poisson_law, b, 1.0, 5.0, 100_000, seed, route="renewal")
        assert abs(p - exact) <= 4.0 * sigma

    def test_unknown_mc_route(self, brownian_law):
        with pytest.raises(DomainError):
            aging.aging_prob_mc(brownian_law, TAIL, 1.0, 1.0, 10, 1, route="exact")


class TestZeroAtom:
    def test_equal_times_half_alpha(self):
        assert aging.zero_atom(LevyFamily.brownian(), 0.5, 1.0, 1.0) == pytest.approx(0.5, abs=1e-12)

    def test_continuous_families_share_the_atom(self):
        brownian = aging.zero_atom(LevyFamily.brownian(), 0.7, 2.0, 3.0)
        stable = aging.zero_atom(LevyFamily.symmetric_stable(1.2), 0.7, 2.0, 3.0)
        assert brownian == pytest.approx(stable, abs=1e-15)
        assert brownian == pytest.approx(float(AgingKernel(0.7, 3.0).survival(2.0)), abs=1e-15)

    def test_lattice_family_adds_no_jump_mass(self):
        poisson = aging.zero_atom(LevyFamily.poisson(1.0), 0.5, 1.0, 1.0)
        assert 0.5 < poisson < 1.0

    def test_renewal_frequency(self, seed):
        law = MarginalLaw(LevyFamily.poisson(1.0), AlphaScale(0.5))
        zero_set = BorelSet.parse("[0,0.5]")
        p, sigma = aging.aging_prob_mc(law, zero_set, 1.0, 1.0, 100_000, seed, route="renewal")
        expected = aging.zero_atom(law.family, 0.5, 1.0, 1.0)
        assert abs(p - expected) <= 4.0 * sigma


class TestJointProbability:
    def test_single_time_matches_convolution(self, brownian_law, seed):
        exact = aging.aging_prob(brownian_law, TAIL, 1.0, 1.0)
        value, error = aging.aging_joint_prob(brownian_law, [TAIL], [1.0], 1.0, n_mc=20_000, seed=seed,
                                              return_error=True)
        assert abs(value - exact) <= 4.0 * error + 1e-3

    def test_nested_sets_are_ordered(self, brownian_law, seed):
        small = [BorelSet.parse("(1,inf)"), BorelSet.parse("(1,inf)")]
        large = [BorelSet.parse("(0.5,inf)"), BorelSet.parse("(0.5,inf)")]
        p_small = aging.aging_joint_prob(brownian_law, small, [0.5, 1.0], 1.0, n_mc=4000, seed=seed)
        p_large = aging.aging_joint_prob(brownian_law, large, [0.5, 1.0], 1.0, n_mc=4000, seed=seed)
        assert 0.0 < p_small <= p_large

    def test_validation(self, brownian_law):
        with pytest.raises(DomainError):
            aging.aging_joint_prob(brownian_law, [TAIL], [1.0, 2.0], 1.0)
        with pytest.raises(DomainError):
            aging.aging_joint_prob(brownian_law, [TAIL, TAIL], [2.0, 1.0], 1.0)
        with pytest.raises(DomainError):
            aging.aging_joint_prob(brownian_law, [BorelSet.parse("[-1,1]")], [1.0], 1.0)


class TestAsymptotics:
    def test_ratio_table_approaches_one(self, brownian_law):
        table = aging.asymptotic_ratio_table(brownian_law, TAIL, 1.0, [10.0, 100.0, 1000.0, 10000.0])
        assert list(table.columns) == ['t0', 'prob', 'asymptotic', 'ratio']
        gaps = np.abs(table['ratio'].to_numpy() - 1.0)
        assert np.all(np.diff(gaps) < 0.0)
        assert gaps[-1] < 0.05

    def test_power_law_slope(self, brownian_law):
        t0 = np.array([100.0, 1000.0, 10000.0])
        probs = [aging.aging_prob(brownian_law, TAIL, 1.0, x) for x in t0]
        assert aging.fit_loglog_slope(t0, probs) == pytest.approx(-0.5, abs=0.05)

    def test_asymptotic_prob_scaling(self, brownian_law):
        a = aging.asymptotic_prob(brownian_law, TAIL, 1.0, 100.0)
        b = aging.asymptotic_prob(brownian_law, TAIL, 1.0, 400.0)
        assert a / b == pytest.approx(2.0, rel=1e-12)

    def test_vacuous_set_raises(self):
        law = MarginalLaw(LevyFamily.poisson(1.0), AlphaScale(0.5))
        with pytest.raises(VacuousAsymptoticsError):
            aging.asymptotic_prob(law, BorelSet.parse("(0.2,0.7]"), 1.0, 100.0)

    def test_slope_fit_validation(self):
        assert aging.fit_loglog_slope([1.0, 10.0], [1.0, 100.0]) == pytest.approx(2.0)
        with pytest.raises(DomainError):
            aging.fit_loglog_slope([1.0], [1.0])

    def test_monotone_in_age(self, brownian_law):
        report = aging.monotone_aging_check(brownian_law, TAIL, 1.0, [0.5, 1.0, 2.0, 4.0, 8.0])
        assert report.passed
        assert report.statistics['violations'] == []


class TestFractionalPoissonMean:
    def test_asymptotic_value(self):
        assert aging.fpp_aging_mean(0.5, 1.0, 1.0, 100.0) == pytest.approx(0.056419, abs=1e-6)

    def test_exact_mean_approaches_asymptote(self):
        exact = aging.fpp_aging_mean_exact(0.5, 1.0, 1.0, 100.0)
        assert exact == pytest.approx(aging.fpp_aging_mean(0.5, 1.0, 1.0, 100.0), rel=0.01)

    def test_unaged_mean(self):
        assert aging.fpp_aging_mean_exact(0.5, 1.0, 1.0, 0.0) == pytest.approx(1.0 / special.gamma(1.5))

    def test_caputo_power_identity(self):
        value, closed = aging.caputo_power_identity(0.5, 1.0)
        assert value == pytest.approx(closed, rel=1e-8)
        assert closed == pytest.approx(math.pi / 2.0, rel=1e-12)

    def test_monte_carlo_near_stationary(self, rng):
        mean, error = aging.fpp_aging_mean_mc(0.99, 1.0, 1.0, 1.0, 50_000, rng, return_error=True)
        exact = aging.fpp_aging_mean_exact(0.99, 1.0, 1.0, 1.0)
        assert abs(mean - exact) <= 4.0 * error
        assert mean == pytest.approx(1.0, rel=0.05)


class TestScalingChecks:
    def test_self_similarity_holds_for_brownian(self, seed):
        report = aging.self_similarity_check(LevyFamily.brownian(), AlphaScale(0.5), 1.0, 4.0, [0.5, 1.0],
                                             n=5000, seed=seed, level=1e-3)
        assert report.passed
        assert report.statistics['scale_factor'] == pytest.approx(2.0 ** 0.5)
        assert len(report.statistics['tests']) == 5

    def test_self_similarity_rejects_poisson(self, seed):
        with pytest.raises(UnsupportedFamilyError):
            aging.self_similarity_check(LevyFamily.poisson(1.0), AlphaScale(0.5), 1.0, 4.0, [1.0],
                                        n=100, seed=seed)

    def test_stationarity_contrast(self, seed):
        report = aging.stationarity_limit_check(LevyFamily.brownian(), 1.0, 1.0, [0.1, 0.99], n=5000, seed=seed)
        distances = report.statistics['ks_distance']
        assert distances[0] > 0.1
        assert distances[1] < distances[0]
        assert report.statistics['kernel_cdf_at_5pct_t'][1] >= 0.9

    def test_stationarity_needs_concentrated_kernel(self, seed):
        # alpha = 0.99, t0 = 1 keeps about 0.97 of the kernel mass below 0.05 t
        loose = aging.stationarity_limit_check(LevyFamily.brownian(), 1.0, 1.0, [0.99], n=2000, seed=seed,
                                               threshold=1.0)
        strict = aging.stationarity_limit_check(LevyFamily.brownian(), 1.0, 1.0, [0.99], n=2000, seed=seed,
                                                threshold=1.0, kernel_mass_floor=0.99)
        assert loose.passed
        assert not strict.passed
        assert strict.tolerances['kernel_mass_floor'] == 0.99


class TestKernelTransformChecks:
    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
    def test_decay_along_decades(self, alpha):
        report = aging.kernel_decay_check(alpha)
        assert report.passed
        assert report.statistics['last_decade_drift'] <= 0.10
        # p_t0(s) (s t0)^(1-alpha) tends to 1/Gamma(alpha)
        assert report.statistics['scaled'][-1] == pytest.approx(1.0 / special.gamma(alpha), rel=1e-2)

    def test_decay_flags_a_short_grid(self):
        report = aging.kernel_decay_check(0.5, t0_grid=[0.001, 0.01], rel=0.01)
        assert not report.passed

    def test_decay_rejects_bad_input(self):
        with pytest.raises(DomainError):
            aging.kernel_decay_check(0.5, s=0.0)
        with pytest.raises(DomainError):
            aging.kernel_decay_check(0.5, t0_grid=[1.0])

    def test_alpha_limit(self):
        report = aging.kernel_alpha_limit_check()
        assert report.passed
        assert report.statistics['value_at_one'] == 1.0
        gaps = report.statistics['gaps']
        assert gaps[-1] == pytest.approx(1.17e-10, rel=0.05)
