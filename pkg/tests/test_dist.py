import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from anticonc.dist import (
    FLOAT,
    from_json,
    make_discrete,
    mean,
    parse_distributions,
    point_mass,
    tail_at_most,
    tail_below,
    to_rational,
)
from anticonc.errors import InvalidInput, MassNotOne, NegativeValue, NonPositiveProb

from conftest import rational_dists


class TestMakeDiscrete:
    def test_fair_coin(self):
        d = make_discrete([(0, F(1, 2)), (1, F(1, 2))])
        assert len(d) == 2
        assert mean(d) == F(1, 2)

    def test_duplicates_merged(self):
        d = make_discrete([(1, F(1, 3)), (1, F(1, 3)), (2, F(1, 3))])
        assert d.atoms == [(1, F(2, 3)), (2, F(1, 3))]

    def test_mass_not_one_reports_deviation(self):
        with pytest.raises(MassNotOne) as info:
            make_discrete([(0, F(1, 2)), (1, "0.4")])
        assert info.value.details["deviation"] == F(-1, 10)

    def test_negative_value(self):
        with pytest.raises(NegativeValue):
            make_discrete([(-1, 1)])

    def test_negative_prob(self):
        with pytest.raises(NonPositiveProb):
            make_discrete([(0, F(3, 2)), (1, F(-1, 2))])

    def test_zero_prob_atoms_dropped(self):
        d = make_discrete([(0, 1), (5, 0)])
        assert d.atoms == [(0, 1)]

    def test_sorted_output(self):
        d = make_discrete([(3, F(1, 4)), (0, F(1, 4)), (2, F(1, 2))])
        assert d.values == (0, 2, 3)

    def test_float_mode_tolerance(self):
        d = make_discrete([(0.0, 0.1), (1.0, 0.2), (2.0, 0.7 + 1e-13)], mode=FLOAT)
        assert d.mode == FLOAT
        with pytest.raises(MassNotOne):
            make_discrete([(0.0, 0.5), (1.0, 0.5 + 1e-9)], mode=FLOAT)

    def test_bad_pair(self):
        with pytest.raises(InvalidInput):
            make_discrete([(1, 2, 3)])


class TestMean:
    def test_weighted_sum(self):
        assert mean(make_discrete([(0, F(2, 3)), (3, F(1, 3))])) == 1

    def test_point_mass(self):
        assert mean(point_mass(5)) == 5

    def test_random_round_trip(self):
        rng = random.Random(11)
        for _ in range(200):
            k = rng.randint(1, 6)
            vals = [F(rng.randint(0, 40), rng.randint(1, 9)) for _ in range(k)]
            w = [rng.randint(1, 30) for _ in range(k)]
            probs = [F(x, sum(w)) for x in w]
            expected = sum(v * p for v, p in zip(vals, probs))
            assert mean(make_discrete(list(zip(vals, probs)))) == expected


class TestTailBelow:
    def test_atom_at_threshold_excluded(self):
        d = make_discrete([(0, F(1, 3)), (F(3, 2), F(2, 3))])
        assert tail_below(d, F(3, 2)) == F(1, 3)

    def test_zero_threshold(self):
        assert tail_below(make_discrete([(0, F(1, 2)), (1, F(1, 2))]), 0) == 0

    def test_strict_at_boundary(self):
        assert tail_below(make_discrete([(0, F(2, 3)), (3, F(1, 3))]), 3) == F(2, 3)

    @given(rational_dists(), st.fractions(min_value=0, max_value=12, max_denominator=8))
    def test_partition_of_mass(self, d, t):
        above = sum((p for v, p in d.atoms if v > t), F(0))
        assert tail_below(d, t) + d.prob_at(t) + above == 1
        assert tail_at_most(d, t) == tail_below(d, t) + d.prob_at(t)

    @given(rational_dists(), st.fractions(min_value=0, max_value=12, max_denominator=8),
           st.fractions(min_value=0, max_value=3, max_denominator=8))
    def test_monotone(self, d, t, h):
        assert tail_below(d, t) <= tail_below(d, t + h)


def test_construction_invariants_10k():
    rng = random.Random(2024)
    for _ in range(10_000):
        k = rng.randint(1, 8)
        w = [rng.randint(0, 9) for _ in range(k)]
        if not any(w):
            w[0] = 1
        d = make_discrete([(F(rng.randint(0, 20), 4), F(x, sum(w))) for x in w])
        assert sum(d.probs) == 1
        assert all(a < b for a, b in zip(d.values, d.values[1:]))
        assert all(p > 0 for p in d.probs)
        assert all(v >= 0 for v in d.values)


class TestJson:
    def test_parse_rational_and_decimal(self):
        d = from_json({"type": "discrete", "atoms": [{"v": "0.5", "p": "1/3"}, {"v": "2", "p": "2/3"}]})
        assert d.atoms == [(F(1, 2), F(1, 3)), (2, F(2, 3))]

    def test_round_trip(self):
        d = make_discrete([(F(7, 3), F(1, 5)), (0, F(4, 5))])
        assert from_json(d.to_json()) == d

    def test_list_and_wrapper(self):
        spec = {"atoms": [{"v": 1, "p": 1}]}
        assert len(parse_distributions([spec, spec])) == 2
        assert len(parse_distributions({"distributions": [spec]})) == 1

    def test_rejects_other_types(self):
        with pytest.raises(InvalidInput):
            from_json({"type": "normal", "atoms": []})

    @pytest.mark.parametrize("text,value", [("0.5", F(1, 2)), ("3/4", F(3, 4)), ("1e-3", F(1, 1000)),
                                            (0.1, F(1, 10)), (2, F(2))])
    def test_to_rational(self, text, value):
        assert to_rational(text) == value

    def test_to_rational_garbage(self):
        with pytest.raises(InvalidInput):
            to_rational("abc")
