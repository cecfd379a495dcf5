import math
from fractions import Fraction as F

import pytest
from scipy import stats

from anticonc.bounds import feige_bound
from anticonc.convolve import sum_tail_below
from anticonc.dist import make_discrete
from anticonc.errors import InvalidInput
from anticonc.montecarlo import ContinuousModel, Scenario, estimate_tail, model_from_json, portfolio_sim

EXP1 = ContinuousModel.exponential(1.0)


def erlang_cdf(k, x):
    """P(Gamma(k, 1) <= x) from the finite Poisson sum."""
    return 1.0 - math.exp(-x) * sum(x**j / math.factorial(j) for j in range(k))


def test_erlang_oracle_agrees_with_scipy():
    for k in (1, 2, 5, 10):
        for x in (0.3, 1.5, 6.0, 11.0):
            assert erlang_cdf(k, x) == pytest.approx(stats.gamma.cdf(x, k), abs=1e-12)


class TestEstimateTail:
    def test_single_exponential(self):
        est = estimate_tail([EXP1], 0.5, 200_000, seed=1)
        assert abs(est.point - (1 - math.exp(-1.5))) <= 3 * est.std_error
        assert 1 - math.exp(-1.5) == pytest.approx(0.77687, abs=1e-5)

    @pytest.mark.parametrize("k", [2, 5])
    def test_erlang(self, k):
        est = estimate_tail([EXP1] * k, 1.0, 200_000, seed=k)
        assert abs(est.point - erlang_cdf(k, k + 1.0)) <= 3 * est.std_error

    def test_point_masses(self):
        est = estimate_tail([ContinuousModel.point(0.3), ContinuousModel.point(0.7)], 0.01, 10_000)
        assert est.point == 1.0 and est.std_error == 0.0

    def test_ci(self):
        est = estimate_tail([EXP1], 1.0, 50_000, seed=3)
        assert est.ci95[0] == pytest.approx(max(0.0, est.point - 1.96 * est.std_error))
        assert est.ci95[1] == pytest.approx(min(1.0, est.point + 1.96 * est.std_error))

    def test_reproducible_and_thread_independent(self):
        models = [EXP1, ContinuousModel.uniform(0, 1), ContinuousModel.lognormal(0.5, 1.0)]
        a = estimate_tail(models, 0.7, 100_000, seed=42, threads=1)
        b = estimate_tail(models, 0.7, 100_000, seed=42, threads=4)
        assert a == b
        assert estimate_tail(models, 0.7, 100_000, seed=43) != a

    def test_min_samples(self):
        with pytest.raises(InvalidInput):
            estimate_tail([EXP1], 1.0, 100)

    def test_discrete_matches_exact_engine(self):
        d1 = make_discrete([(0, F(1, 3)), (F(3, 2), F(2, 3))])
        d2 = make_discrete([(0, F(1, 2)), (F(1, 2), F(1, 4)), (2, F(1, 4))])
        delta = F(3, 4)
        exact = float(sum_tail_below([d1, d2], d1.mean() + d2.mean() + delta))
        models = [ContinuousModel.discrete(d1), ContinuousModel.discrete(d2)]
        within = 0
        for seed in range(100):
            est = estimate_tail(models, float(delta), 10_000, seed=seed)
            within += abs(est.point - exact) <= 4 * est.std_error
        assert within >= 99

    def test_bound_across_model_suite(self):
        suite = [
            [EXP1] * 3,
            [ContinuousModel.uniform(0, 2)] * 4,
            [ContinuousModel.lognormal(1.0, 1.5)] * 2,
            [ContinuousModel.bernoulli(1.0, 0.25)] * 5,
            [ContinuousModel.bernoulli(0.5, 0.1), EXP1, ContinuousModel.point(1.0)],
        ]
        for models in suite:
            for delta in (0.1, 0.5, 1.0, 3.0):
                est = estimate_tail(models, delta, 50_000, seed=7)
                assert est.point >= feige_bound(F(str(delta))).value - 4 * est.std_error


class TestModels:
    def test_mean_above_one_rejected(self):
        with pytest.raises(InvalidInput):
            ContinuousModel.exponential(1.5)

    def test_negative_support_rejected(self):
        with pytest.raises(InvalidInput):
            ContinuousModel.uniform(-1, 1)

    @pytest.mark.parametrize("spec,mean", [
        ({"kind": "exponential", "mean": 0.5}, 0.5),
        ({"kind": "uniform", "mean": 0.75}, 0.75),
        ({"kind": "uniform", "lo": 0.2, "hi": 1.0}, 0.6),
        ({"kind": "lognormal", "mean": 1.0, "sigma": 0.5}, 1.0),
        ({"kind": "bernoulli", "mean": 1.0, "p": 0.2}, 1.0),
        ({"kind": "point", "value": 0.25}, 0.25),
        ({"kind": "discrete", "distribution": {"atoms": [{"v": "0", "p": "1/2"}, {"v": "2", "p": "1/2"}]}}, 1.0),
    ])
    def test_from_json(self, spec, mean):
        m = model_from_json(spec)
        assert m.mean == pytest.approx(mean)
        assert model_from_json(m.to_json()) == m

    def test_unknown_kind(self):
        with pytest.raises(InvalidInput):
            model_from_json({"kind": "cauchy"})

    def test_sample_means(self):
        import numpy as np

        rng = np.random.default_rng(0)
        for m in (ContinuousModel.lognormal(0.8, 0.7), ContinuousModel.bernoulli(0.6, 0.3),
                  ContinuousModel.uniform(0.1, 0.9)):
            x = m.sample(rng, 400_000)
            assert x.min() >= 0
            assert x.mean() == pytest.approx(m.mean, rel=0.02)


class TestPortfolio:
    def test_twenty_exponentials(self):
        rep = portfolio_sim(Scenario((EXP1,) * 20, 1.0, 100_000, seed=0))
        assert rep.outperform <= 1 - math.exp(-1) + 3 * rep.std_error
        assert rep.verdict == "pass"
        assert rep.bound == pytest.approx(1 - math.exp(-1))

    def test_large_delta(self):
        rep = portfolio_sim(Scenario((EXP1,) * 3, 1000.0, 10_000))
        assert rep.outperform == 0.0

    def test_point_mass(self):
        rep = portfolio_sim(Scenario((ContinuousModel.point(1.0),), 0.5, 10_000))
        assert rep.outperform == 0.0 and rep.verdict == "pass"

    def test_scenario_json(self):
        sc = Scenario.from_json({"n": 4, "delta": 1, "samples": 20_000, "seed": 3,
                                 "models": [{"kind": "exponential", "mean": 1.0}]})
        assert sc.n == 4 and sc.samples == 20_000
        with pytest.raises(InvalidInput):
            Scenario.from_json({"n": 3, "delta": 1, "models": [{"kind": "point", "value": 1}] * 2})
