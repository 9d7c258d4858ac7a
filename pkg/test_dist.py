# test_dist.py
"""GB2 laws, the aging kernel, regeneration laws and Mittag-Leffler waiting times"""

import math

import numpy as np
import pytest
from scipy import integrate, special

from aging_ctrw.exceptions import DomainError
from aging_ctrw.laws import dist
from aging_ctrw.laws.dist import AgingKernel, GB2Params
from aging_ctrw.simulation.mc_stats import EmpiricalDist, binomial_sigma, ks_one_sample


class TestGB2:
    def test_arcsine_point(self):
        assert dist.gb2_pdf(GB2Params(0.5, 0.5, 1.0), 1.0) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-12)

    def test_scale_property(self):
        assert dist.gb2_pdf(GB2Params(0.5, 0.5, 2.0), 2.0) == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-12)

    @pytest.mark.parametrize("mu,nu,h", [(0.5, 0.5, 1.0), (0.2, 0.8, 3.0), (1.5, 2.0, 0.5), (0.9, 0.6, 10.0)])
    def test_normalization(self, mu, nu, h):
        p = GB2Params(mu, nu, h)
        head, _ = integrate.quad(lambda x: dist.gb2_pdf(p, x), 0.0, h, limit=200)
        tail, _ = integrate.quad(lambda x: dist.gb2_pdf(p, x), h, np.inf, limit=200)
        assert head + tail == pytest.approx(1.0, abs=1e-5)

    def test_cdf_limits(self):
        p = GB2Params(0.3, 0.7, 2.0)
        assert dist.gb2_cdf(p, 0.0) == 0.0
        assert dist.gb2_cdf(p, np.inf) == 1.0

    def test_truncated_mean_grows_without_bound(self):
        p = GB2Params(0.5, 0.5, 1.0)
        assert dist.gb2_truncated_mean(p, 1e4) > 3.0 * dist.gb2_truncated_mean(p, 1e2)

    def test_rejects_nonpositive_parameters(self):
        with pytest.raises(DomainError):
            GB2Params(0.0, 0.5, 1.0)


class TestAgingKernel:
    def test_cdf_values(self):
        assert AgingKernel(0.5, 1.0).cdf(1.0) == pytest.approx(0.5, abs=1e-14)
        assert AgingKernel(0.5, 3.0).cdf(1.0) == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert AgingKernel(0.3, 2.0).cdf(0.0) == 0.0

    def test_survival_complements_cdf(self):
        kernel = AgingKernel(0.4, 2.0)
        x = np.array([0.01, 0.5, 3.0, 100.0])
        np.testing.assert_allclose(kernel.survival(x) + kernel.cdf(x), 1.0, atol=1e-13)

    def test_laplace_total_mass(self):
        assert AgingKernel(0.5, 1.0).laplace(0.0) == pytest.approx(1.0, abs=1e-14)

    def test_laplace_incomplete_gamma_value(self):
        expected = math.e * special.erfc(1.0)
        assert AgingKernel(0.5, 1.0).laplace(1.0) == pytest.approx(expected, rel=1e-10)
        assert expected == pytest.approx(0.427584, abs=1e-6)

    def test_laplace_against_quadrature(self):
        for alpha in (0.2, 0.5, 0.8):
            kernel = AgingKernel(alpha, 1.0)
            for s in (0.1, 1.0, 10.0):
                head, _ = integrate.quad(lambda r: math.exp(-s * r) * kernel.pdf(r), 0.0, 1.0,
                                         epsabs=1e-12, epsrel=1e-10, limit=400)
                tail, _ = integrate.quad(lambda r: math.exp(-s * r) * kernel.pdf(r), 1.0, np.inf,
                                         epsabs=1e-12, epsrel=1e-10, limit=400)
                assert head + tail == pytest.approx(kernel.laplace(s), abs=1e-7)

    def test_laplace_near_stationary(self):
        # alpha -> 1 concentrates the kernel at 0
        assert AgingKernel(0.9999, 5.0).laplace(1.0) == pytest.approx(1.0, abs=2e-3)

    def test_laplace_at_alpha_one(self):
        assert dist.kernel_laplace_at(1.0, 5.0, 1.0) == 1.0
        np.testing.assert_array_equal(dist.kernel_laplace_at(1.0, 5.0, np.array([0.0, 2.0])), 1.0)
        assert dist.kernel_laplace_at(1.0 - 1e-10, 1.0, 1.0) == pytest.approx(1.0, abs=1e-9)
        assert dist.kernel_laplace_at(0.5, 1.0, 1.0) == AgingKernel(0.5, 1.0).laplace(1.0)

    def test_laplace_at_domain(self):
        for alpha in (0.0, 1.5):
            with pytest.raises(DomainError):
                dist.kernel_laplace_at(alpha, 1.0, 1.0)
        with pytest.raises(DomainError):
            dist.kernel_laplace_at(1.0, 1.0, -1.0)
        with pytest.raises(DomainError):
            AgingKernel(1.0, 1.0)

    def test_laplace_decreases_with_age(self):
        values = [AgingKernel(0.5, t0).laplace(1.0) for t0 in (1.0, 10.0, 100.0, 1000.0)]
        assert np.all(np.diff(values) < 0.0)

    def test_sampler_matches_cdf(self, rng):
        kernel = AgingKernel(0.5, 1.0)
        draws = kernel.sample(rng, 20_000)
        assert np.median(draws) == pytest.approx(1.0, rel=0.1)
        _, p = ks_one_sample(EmpiricalDist.from_samples(draws), kernel.cdf)
        assert p > 1e-3

    def test_heavy_tail_frequency(self, rng):
        kernel = AgingKernel(0.9, 1.0)
        n = 50_000
        draws = kernel.sample(rng, n)
        expected = kernel.survival(10.0)
        freq = np.mean(draws > 10.0)
        assert abs(freq - expected) <= 4.0 * binomial_sigma(expected, n)

    def test_sampler_is_reproducible(self, rng_factory):
        a = AgingKernel(0.5, 1.0).sample(rng_factory(3), 100)
        b = AgingKernel(0.5, 1.0).sample(rng_factory(3), 100)
        np.testing.assert_array_equal(a, b)

    def test_config_block(self):
        kernel = AgingKernel(0.35, 2.5)
        assert dist.law_from_config(kernel.to_config()) == kernel
        with pytest.raises(DomainError):
            dist.law_from_config({'name': 'aging_kernel', 'alpha': 0.5})

    def test_summary_reports_infinite_mean(self):
        summary = dist.law_summary(AgingKernel(0.5, 1.0))
        assert summary['mean_finite'] is False
        assert summary['quantiles']['q50'] == pytest.approx(1.0, rel=1e-10)


class TestRegenerationLaws:
    def test_remaining_life_is_gb2(self):
        r = np.array([0.1, 1.0, 7.0])
        np.testing.assert_allclose(dist.remaining_life_pdf(0.3, 2.0, r),
                                   dist.gb2_pdf(GB2Params(0.7, 0.3, 2.0), r), rtol=1e-14)

    def test_overshoot_is_translated_remaining_life(self):
        alpha, t = 0.6, 1.5
        r = t + np.array([0.05, 0.5, 2.0, 30.0])
        np.testing.assert_allclose(dist.overshoot_pdf(alpha, t, r),
                                   dist.remaining_life_pdf(alpha, t, r - t), rtol=1e-10)

    def test_age_and_undershoot_normalize(self):
        alpha, t = 0.4, 2.0
        age, _ = integrate.quad(lambda v: dist.age_pdf_gb1(alpha, t, v), 0.0, t, limit=200)
        under, _ = integrate.quad(lambda v: dist.undershoot_pdf(alpha, t, v), 0.0, t, limit=200)
        assert age == pytest.approx(1.0, abs=1e-6)
        assert under == pytest.approx(1.0, abs=1e-6)

    def test_age_symmetric_case(self):
        assert dist.age_cdf_gb1(0.5, 1.0, 0.5) == pytest.approx(0.5, abs=1e-14)

    def test_age_and_undershoot_are_reflections(self):
        alpha, t = 0.3, 1.0
        v = np.array([0.1, 0.4, 0.9])
        np.testing.assert_allclose(dist.age_cdf_gb1(alpha, t, v), 1.0 - dist.undershoot_cdf(alpha, t, t - v),
                                   atol=1e-13)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            dist.age_pdf_gb1(0.5, 1.0, 1.5)
        with pytest.raises(DomainError):
            dist.overshoot_pdf(0.5, 1.0, 0.5)


class TestWaitingTimes:
    def test_exponential_limit(self, rng):
        n = 100_000
        draws = dist.ml_waiting_sample(1.0, 2.0, rng, n)
        assert abs(draws.mean() - 0.5) <= 4.0 * 0.5 / math.sqrt(n)

    def test_survival_at_one(self, rng):
        n = 50_000
        draws = dist.ml_waiting_sample(0.5, 1.0, rng, n)
        expected = dist.ml_waiting_survival(0.5, 1.0, 1.0)
        assert expected == pytest.approx(0.427584, abs=1e-6)
        assert abs(np.mean(draws > 1.0) - expected) <= 4.0 * binomial_sigma(expected, n)

    def test_stable_sampler_laplace(self, rng):
        n = 100_000
        s = dist.onesided_stable_sample(0.5, rng, n)
        values = np.exp(-s)
        assert abs(values.mean() - math.exp(-1.0)) <= 4.0 * values.std() / math.sqrt(n)
