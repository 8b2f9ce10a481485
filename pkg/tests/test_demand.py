import numpy as np
import pytest

from sspolicy.demand import (Cdf, DemandModel, DistributionSpec, Pmf, build_pmf, convolve)
from sspolicy.errors import InvalidParametersError, WindowError


class TestPmf:
    def test_trims_zero_tails(self):
        pmf = Pmf(2, [0.0, 0.25, 0.75, 0.0])
        assert pmf.support_min == 3
        assert pmf.support_max == 4
        assert np.allclose(pmf.probabilities, [0.25, 0.75])

    def test_moments(self):
        pmf = Pmf(0, [0.5, 0.0, 0.5])
        assert pmf.mean == pytest.approx(1.0)
        assert pmf.variance == pytest.approx(1.0)

    @pytest.mark.parametrize("support_min, probabilities", [
        (0, [0.5, -0.1, 0.6]),
        (0, [0.5, 0.4]),
        (-1, [1.0]),
        (0, []),
    ])
    def test_rejects_invalid(self, support_min, probabilities):
        with pytest.raises(InvalidParametersError):
            Pmf(support_min, probabilities)

    def test_probabilities_are_read_only(self):
        pmf = Pmf.point(3)
        with pytest.raises(ValueError):
            pmf.probabilities[0] = 0.5


class TestCdf:
    def test_clamps_outside_support(self):
        cdf = Pmf(5, [0.2, 0.3, 0.5]).cdf()
        assert cdf(4) == 0.0
        assert cdf(-100) == 0.0
        assert cdf(7) == 1.0
        assert cdf(1000) == 1.0
        assert cdf(5) == pytest.approx(0.2)
        assert cdf(6) == pytest.approx(0.5)

    def test_partial_expectations_match_direct_sums(self):
        pmf = Pmf(3, [0.1, 0.2, 0.3, 0.4])
        cdf = Cdf(pmf)
        for y in range(-2, 10):
            over = sum(max(y - d, 0) * q for d, q in zip(pmf.support, pmf.probabilities))
            short = sum(max(d - y, 0) * q for d, q in zip(pmf.support, pmf.probabilities))
            assert cdf.expected_overage(y) == pytest.approx(over, abs=1e-12)
            assert cdf.expected_shortage(y) == pytest.approx(short, abs=1e-12)

    def test_vectorized_lookup(self):
        cdf = Pmf(0, [0.5, 0.5]).cdf()
        assert np.allclose(cdf(np.array([-1, 0, 1, 2])), [0.0, 0.5, 1.0, 1.0])


class TestBuildPmf:
    def test_uniform(self):
        pmf = build_pmf(DistributionSpec(kind="uniform-discrete", mean=40, spread=10))
        assert (pmf.support_min, pmf.support_max) == (30, 50)
        assert np.allclose(pmf.probabilities, 1 / 21)

    def test_uniform_spread_beyond_mean_is_rejected(self):
        with pytest.raises(InvalidParametersError):
            build_pmf(DistributionSpec(kind="uniform", mean=5, spread=6))

    def test_discretized_normal_covers_zero_to_twice_mean(self):
        pmf = build_pmf(DistributionSpec(kind="normal-discretized", mean=10, cv=0.3))
        assert (pmf.support_min, pmf.support_max) == (0, 20)
        assert len(pmf.probabilities) == 21
        assert pmf.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        assert pmf.mean == pytest.approx(10.0, abs=0.01)

    def test_normal_without_spread_is_a_point_mass(self):
        pmf = build_pmf(DistributionSpec(kind="normal", mean=12, cv=0.0))
        assert (pmf.support_min, pmf.support_max) == (12, 12)

    def test_negative_binomial_moments(self):
        pmf = build_pmf(DistributionSpec(kind="negative-binomial", mean=10, cv=0.5))
        assert pmf.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        assert pmf.mean == pytest.approx(10.0, rel=1e-6)
        assert pmf.variance == pytest.approx(25.0, rel=1e-5)

    def test_negative_binomial_needs_overdispersion(self):
        with pytest.raises(InvalidParametersError):
            build_pmf(DistributionSpec(kind="nbinom", mean=10, cv=0.2))

    def test_explicit_is_renormalized(self):
        pmf = build_pmf(DistributionSpec(kind="explicit", probabilities=[0.3, 0.7 + 5e-10],
                                         support_min=4))
        assert pmf.support_min == 4
        assert pmf.probabilities.sum() == pytest.approx(1.0, abs=1e-15)

    def test_missing_parameters(self):
        with pytest.raises(ValueError):
            DistributionSpec(kind="normal-discretized", mean=10)

    @pytest.mark.parametrize("spec, variance", [
        (DistributionSpec(kind="uniform-discrete", mean=40, spread=10), 110 / 3),
        (DistributionSpec(kind="normal-discretized", mean=100, cv=0.1), 100.0),
        (DistributionSpec(kind="negative-binomial", mean=100, cv=0.5), 2500.0),
    ])
    def test_spec_variance(self, spec, variance):
        assert spec.variance == pytest.approx(variance)


class TestDemandModel:
    def test_accumulated_pmf_is_the_convolution(self):
        a, b, c = Pmf(0, [0.5, 0.5]), Pmf(1, [0.25, 0.75]), Pmf.point(2)
        model = DemandModel([a, b, c])
        window = model.accumulated_pmf(1, 3)
        assert window.support_min == 3
        assert np.allclose(window.probabilities, np.convolve([0.5, 0.5], [0.25, 0.75]))
        assert model.accumulated_pmf(2, 1) is b

    def test_cache_returns_same_object(self):
        model = DemandModel([Pmf(0, [0.5, 0.5])] * 4).freeze()
        assert model.accumulated_cdf(2, 3) is model.accumulated_cdf(2, 3)
        assert model.frozen
        assert model.freeze() is model

    def test_cdf_dominance_across_windows(self):
        model = DemandModel([Pmf(0, [0.2, 0.5, 0.3])] * 3)
        ys = np.arange(-1, 8)
        for k in (1, 2):
            assert np.all(model.accumulated_cdf(1, k)(ys) >= model.accumulated_cdf(1, k + 1)(ys))

    @pytest.mark.parametrize("n, k", [(0, 1), (4, 1), (2, 3), (1, 0)])
    def test_window_outside_horizon(self, n, k):
        model = DemandModel([Pmf.point(1)] * 3)
        with pytest.raises(WindowError):
            model.accumulated_cdf(n, k)

    def test_window_mass_sums_to_one(self):
        model = DemandModel([build_pmf(DistributionSpec(kind="normal", mean=100, cv=0.3))] * 12)
        assert model.accumulated_pmf(1, 12).probabilities.sum() == pytest.approx(1.0, abs=1e-12)

    def test_convolve_shifts_support(self):
        assert convolve(Pmf.point(3), Pmf.point(4)).support_min == 7

    def test_two_coin_triangle(self):
        coin = Pmf(0, [0.5, 0.5])
        total = convolve(coin, coin)
        assert total.support_min == 0
        assert np.allclose(total.probabilities, [0.25, 0.5, 0.25], rtol=0, atol=1e-15)

    def test_uniform_sum_against_double_loop(self):
        first = build_pmf(DistributionSpec(kind="uniform", mean=60, spread=10))
        second = build_pmf(DistributionSpec(kind="uniform", mean=15, spread=10))
        expected = {}
        for d1, q1 in zip(first.support, first.probabilities):
            for d2, q2 in zip(second.support, second.probabilities):
                expected[d1 + d2] = expected.get(d1 + d2, 0.0) + q1 * q2
        total = convolve(first, second)
        assert (total.support_min, total.support_max) == (55, 95)
        assert np.allclose(total.probabilities, [expected[d] for d in range(55, 96)],
                           rtol=0, atol=1e-15)
        assert total.mean == pytest.approx(75.0, abs=1e-9)

    def test_example_two_period_window(self, example_instance):
        model = example_instance.demand
        assert model.accumulated_cdf(1, 2).mean == pytest.approx(75.0, abs=1e-9)
        assert model.accumulated_cdf(4, 1)(49) == pytest.approx(20 / 21, abs=1e-12)

    def test_window_means_add_up(self):
        specs = [DistributionSpec(kind="normal", mean=12, cv=0.3),
                 DistributionSpec(kind="nbinom", mean=8, cv=0.7),
                 DistributionSpec(kind="uniform", mean=5, spread=3),
                 DistributionSpec(kind="explicit", probabilities=[0.1, 0.6, 0.3], support_min=2)]
        pmfs = [build_pmf(spec) for spec in specs]
        model = DemandModel(pmfs)
        for n in range(1, 5):
            for k in range(1, 6 - n):
                expected = sum(pmf.mean for pmf in pmfs[n - 1:n + k - 1])
                assert model.accumulated_pmf(n, k).mean == pytest.approx(expected, abs=1e-9)
