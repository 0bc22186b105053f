import math

import numpy as np
import pytest
from scipy import stats

from hdmean import corrmat, limit_law
from hdmean.errors import DomainError
from hdmean.estimators import ratio_unbiased_tr_r2
from hdmean.sample_stats import summarize
from hdmean.sampling import SeedSpec, sample_compound_fast

SEED = SeedSpec(101, 0)


class TestConstruction:
    def test_identity_spectrum_weights(self):
        law = limit_law.mixture_from_spectrum(np.ones(16), k_max=4, eps=0.0)
        np.testing.assert_allclose(law.rho, [0.25] * 4)
        np.testing.assert_allclose(law.b, math.sqrt(1 - 4 / 16))

    def test_identity_spectrum_eps_cut(self):
        law = limit_law.mixture_from_spectrum(np.ones(101), k_max=10, eps=0.1)
        assert law.rho == ()
        assert law.b == 1.0

    def test_equicorrelated_scaling_limit(self):
        c = 2.0
        p = 1_000_000
        r = c / math.sqrt(p)
        lam = np.full(p, 1.0 - r)
        lam[0] = 1.0 + (p - 1) * r
        law = limit_law.mixture_from_spectrum(lam)
        assert abs(law.rho[0] - c / math.sqrt(c * c + 1)) < 1e-2

    def test_fully_spiked(self):
        lam = np.zeros(8)
        lam[0] = 8.0
        law = limit_law.mixture_from_spectrum(lam)
        assert law.rho == (1.0,)
        assert law.b == 0.0

    def test_single_spike_cases(self):
        assert limit_law.single_spike_law(0.0) == limit_law.normal_law()
        mid = limit_law.single_spike_law(1.0)
        np.testing.assert_allclose([mid.b, mid.rho[0]], [1 / math.sqrt(2)] * 2)
        top = limit_law.single_spike_law(math.inf)
        assert top.b == 0.0 and top.rho == (1.0,)

    def test_geometric_vanishing_strength(self):
        assert limit_law.geometric_spike_law(0.0, 12) == limit_law.normal_law()

    def test_geometric_weight_sum(self):
        # sum of squared weights tends to tau^2/(tau^2+3)
        for tau in (0.5, 1.0, 4.0):
            law = limit_law.geometric_spike_law(tau, 40)
            assert abs(sum(r * r for r in law.rho) - tau**2 / (tau**2 + 3)) < 1e-10

    def test_geometric_b_limit(self):
        law = limit_law.geometric_spike_law(1.0, 30)
        assert abs(law.b**2 + sum(r * r for r in law.rho) - 1.0) < 1e-10
        assert abs(law.b - math.sqrt(3 / 4)) < 4.0**-30 + 1e-12

    def test_normalization_across_constructors(self, rng):
        laws = [
            limit_law.normal_law(),
            limit_law.single_spike_law(0.7),
            limit_law.geometric_spike_law(2.5, 20),
            limit_law.mixture_from_spectrum(np.sort(rng.gamma(2, size=30))[::-1]),
            limit_law.law_from_weights([0.9, 0.3, 0.2]),
        ]
        for law in laws:
            assert abs(law.b**2 + sum(r * r for r in law.rho) - 1.0) <= 1e-10

    def test_law_validation(self):
        with pytest.raises(DomainError):
            limit_law.MixtureLaw(b=0.5, rho=(0.5,))
        with pytest.raises(DomainError):
            limit_law.MixtureLaw(b=0.0, rho=(0.5, 0.9))

    def test_overweight_rescaled(self):
        law = limit_law.law_from_weights([1.0, 0.8])
        assert law.b == 0.0
        assert abs(sum(r * r for r in law.rho) - 1.0) < 1e-12


class TestSampleLaw:
    def test_normal_moments(self):
        draws = limit_law.sample_law(limit_law.normal_law(), 1_000_000, SEED)
        assert abs(draws.mean()) < 5 / math.sqrt(draws.size)
        assert abs(draws.var() - 1.0) < 5 * math.sqrt(2 / draws.size)

    def test_support_bound_pure_spike(self):
        law = limit_law.single_spike_law(math.inf)
        draws = limit_law.sample_law(law, 200_000, SEED)
        assert draws.min() >= -1 / math.sqrt(2) - 1e-12

    def test_unit_variance_any_law(self):
        law = limit_law.single_spike_law(1.3)
        draws = limit_law.sample_law(law, 400_000, SEED)
        fourth = np.mean((draws - draws.mean()) ** 4)
        se_var = math.sqrt((fourth - draws.var() ** 2) / draws.size)
        assert abs(draws.var() - 1.0) < 5 * se_var

    def test_deterministic(self):
        a = limit_law.sample_law(limit_law.single_spike_law(2.0), 100, SeedSpec(5, 5))
        b = limit_law.sample_law(limit_law.single_spike_law(2.0), 100, SeedSpec(5, 5))
        assert np.array_equal(a, b)


class TestCdf:
    def test_normal_median(self):
        assert limit_law.cdf(limit_law.normal_law(), 0.0, "cf_inversion") == 0.5
        mc = limit_law.cdf(limit_law.normal_law(), 0.0, "monte_carlo", 400_000, SEED)
        assert abs(mc - 0.5) < 0.005

    def test_pure_spike_at_zero(self):
        # at t=0 the pure-spike cdf equals P(chi2_1 <= 1)
        expected = stats.chi2.cdf(1.0, 1)
        law = limit_law.single_spike_law(math.inf)
        assert abs(limit_law.cdf(law, 0.0, "cf_inversion") - expected) < 3e-4
        mc = limit_law.cdf(law, 0.0, "monte_carlo", 1_000_000, SEED)
        assert abs(mc - expected) < 0.005

    def test_support_boundary(self):
        law = limit_law.single_spike_law(math.inf)
        assert limit_law.cdf(law, -1 / math.sqrt(2), "monte_carlo", 100_000, SEED) == 0.0

    def test_methods_agree_on_grid(self):
        for law in (limit_law.normal_law(), limit_law.single_spike_law(1.0),
                    limit_law.single_spike_law(math.inf)):
            for t in range(-3, 6):
                mc = limit_law.cdf(law, float(t), "monte_carlo", 200_000, SEED)
                cf = limit_law.cdf(law, float(t), "cf_inversion")
                assert abs(mc - cf) <= 0.005, (law, t)

    def test_monotone_and_limits(self):
        law = limit_law.single_spike_law(0.8)
        grid = np.linspace(-4, 6, 41)
        vals = [limit_law.cdf(law, float(t), "cf_inversion") for t in grid]
        assert np.all(np.diff(vals) >= -1e-9)
        assert limit_law.cdf(law, -50.0, "cf_inversion") < 1e-6
        assert limit_law.cdf(law, 50.0, "cf_inversion") > 1 - 1e-6

    def test_degenerate_law_rejected(self):
        broken = object.__new__(limit_law.MixtureLaw)
        object.__setattr__(broken, "b", 0.0)
        object.__setattr__(broken, "rho", ())
        with pytest.raises(DomainError):
            limit_law.cdf(broken, 0.0, "cf_inversion")

    def test_unknown_method(self):
        with pytest.raises(DomainError):
            limit_law.cdf(limit_law.normal_law(), 0.0, "bisection")


class TestPValue:
    def test_huge_negative_statistic(self):
        val = limit_law.p_value(limit_law.normal_law(), -1e6, "monte_carlo", 50_000, SEED)
        assert val == 1.0

    def test_normal_quantile(self):
        val = limit_law.p_value(limit_law.normal_law(), 1.6449, "cf_inversion")
        assert abs(val - 0.05) < 5e-4

    def test_chi_square_quantile(self):
        q = stats.chi2.ppf(0.95, 1)
        law = limit_law.single_spike_law(math.inf)
        val = limit_law.p_value(law, (q - 1) / math.sqrt(2), "monte_carlo", 1_000_000, SEED)
        assert abs(val - 0.05) < 0.004

    def test_clipping_floor(self):
        val = limit_law.p_value(limit_law.normal_law(), 1e6, "monte_carlo", 10_000, SEED)
        assert val == 1 / 10_001


class TestPluginLaw:
    def test_strong_spike_detected(self):
        ds = sample_compound_fast(60, 0.6, 40, SeedSpec(55, 0))
        summary = summarize(ds.rows)
        est = ratio_unbiased_tr_r2(summary, d=39)
        law = limit_law.plugin_law(summary, est)
        assert len(law.rho) >= 1
        assert law.rho[0] > 0.5

    def test_weights_below_eps_dropped(self):
        # an exactly flat sample spectrum at p = 200 puts every weight at
        # 1/sqrt(200) < 0.1, so the plug-in law collapses to the normal
        from hdmean.estimators import make_trace_estimate
        from hdmean.sample_stats import SampleSummary

        p = 200
        summary = SampleSummary(
            n_eff=1000, p=p, mean=np.zeros(p), cov=np.eye(p), diag=np.ones(p), corr=np.eye(p)
        )
        est = make_trace_estimate(float(p), p, d=10**9)
        law = limit_law.plugin_law(summary, est)
        assert law == limit_law.normal_law()

    def test_serialization_round_trip(self):
        law = limit_law.single_spike_law(1.0)
        back = limit_law.law_from_dict(law.to_dict())
        assert back.rho == law.rho
        assert abs(back.b - law.b) < 1e-12

    def test_inconsistent_b_rejected(self):
        with pytest.raises(DomainError):
            limit_law.law_from_dict({"b": 0.9, "rho": [1.0]})
