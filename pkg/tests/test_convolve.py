import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from anticonc.convolve import (
    ConvolutionBudget,
    MAX_ATOMS_ENV,
    convolve,
    convolve_all,
    default_max_atoms,
    pruned_sum,
    sum_tail_below,
)
from anticonc.dist import make_discrete, mean, point_mass, tail_below
from anticonc.errors import BudgetExceeded, InvalidInput

from conftest import brute_force_tail, rational_dists

COIN = make_discrete([(0, F(1, 2)), (1, F(1, 2))])


def two_point(a, b, p):
    return make_discrete([(a, p), (b, 1 - p)])


def random_dist(rng, max_atoms=6):
    k = rng.randint(1, max_atoms)
    w = [rng.randint(1, 9) for _ in range(k)]
    return make_discrete([(F(rng.randint(0, 12), 2), F(x, sum(w))) for x in w])


class TestConvolve:
    def test_binomial(self):
        assert convolve(COIN, COIN).atoms == [(0, F(1, 4)), (1, F(1, 2)), (2, F(1, 4))]

    def test_point_masses(self):
        assert convolve(point_mass(F(3, 2)), point_mass(2)) == point_mass(F(7, 2))

    def test_two_point_product(self):
        d = two_point(0, 3, F(2, 3))
        assert convolve(d, d).atoms == [(0, F(4, 9)), (3, F(4, 9)), (6, F(1, 9))]

    def test_budget_exceeded(self):
        d = make_discrete([(0, F(1, 3)), (1, F(1, 3)), (5, F(1, 3))])
        with pytest.raises(BudgetExceeded):
            convolve(d, d, ConvolutionBudget(max_atoms=4))

    def test_atom_count_bound(self):
        rng = random.Random(1)
        for _ in range(100):
            a, b = random_dist(rng), random_dist(rng)
            assert len(convolve(a, b)) <= len(a) * len(b)

    @given(rational_dists(max_atoms=4), rational_dists(max_atoms=4), rational_dists(max_atoms=4))
    @settings(max_examples=60, deadline=None)
    def test_commutative_associative(self, a, b, c):
        assert convolve(a, b) == convolve(b, a)
        assert convolve(convolve(a, b), c) == convolve(a, convolve(b, c))

    @given(rational_dists(), rational_dists())
    def test_mean_additive(self, a, b):
        assert mean(convolve(a, b)) == mean(a) + mean(b)


class TestSumTailBelow:
    def test_feige_pair(self):
        d = two_point(0, 3, F(2, 3))
        assert sum_tail_below([d, d], 3) == F(4, 9)

    def test_single(self):
        d = make_discrete([(0, F(1, 3)), (F(3, 2), F(2, 3))])
        assert sum_tail_below([d], F(3, 2)) == tail_below(d, F(3, 2))

    def test_twelve_feige_components(self):
        d = two_point(0, F(25, 2), F(23, 25))
        assert sum_tail_below([d] * 12, F(25, 2)) == F(23, 25) ** 12
        assert F(23, 25) == F(23, 2) / F(25, 2)

    def test_matches_brute_force(self):
        rng = random.Random(2)
        for _ in range(100):
            ds = [random_dist(rng, 4) for _ in range(rng.randint(1, 4))]
            t = F(rng.randint(1, 40), 2)
            assert sum_tail_below(ds, t) == brute_force_tail(ds, t)

    def test_pruned_equals_unpruned(self):
        rng = random.Random(3)
        for _ in range(500):
            ds = [random_dist(rng) for _ in range(rng.randint(1, 5))]
            t = F(rng.randint(1, 60), 4)
            assert sum_tail_below(ds, t) == tail_below(convolve_all(ds), t)

    def test_mass_conservation(self):
        rng = random.Random(4)
        for _ in range(100):
            ds = [random_dist(rng) for _ in range(rng.randint(1, 5))]
            ps = pruned_sum(ds, F(rng.randint(1, 30), 2), check_mass=True)
            assert ps.below + ps.absorbed == 1
            assert all(v < ps.threshold for v in ps.values)

    def test_pruning_keeps_atoms_below_threshold(self):
        d = make_discrete([(k, F(1, 10)) for k in range(10)])
        # unpruned: 91 atoms; below t = 5 only 5 survive
        assert len(pruned_sum([d] * 10, 5).values) == 5
        assert len(convolve_all([d] * 10)) == 91

    def test_budget_exceeded(self):
        d = make_discrete([(F(k, 7), F(1, 7)) for k in range(7)])
        with pytest.raises(BudgetExceeded):
            sum_tail_below([d, d, d], 100, ConvolutionBudget(max_atoms=10))

    def test_threshold_must_be_positive(self):
        with pytest.raises(InvalidInput):
            sum_tail_below([COIN], 0)

    def test_cdf_strict_query_above_threshold(self):
        with pytest.raises(InvalidInput):
            pruned_sum([COIN], 1).cdf_strict(2)

    def test_rejects_float_mode(self):
        d = make_discrete([(0.0, 1.0)], mode="float")
        with pytest.raises(InvalidInput):
            sum_tail_below([d], 1)


def test_env_budget(monkeypatch):
    monkeypatch.setenv(MAX_ATOMS_ENV, "3")
    assert default_max_atoms() == 3
    d = make_discrete([(k, F(1, 4)) for k in range(4)])
    with pytest.raises(BudgetExceeded):
        convolve(d, d)
    monkeypatch.setenv(MAX_ATOMS_ENV, "nope")
    with pytest.raises(InvalidInput):
        default_max_atoms()
