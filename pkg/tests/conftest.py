import itertools
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from anticonc.dist import make_discrete


@st.composite
def rational_dists(draw, max_atoms=6, max_value=10, value_den=4):
    """Random exact distributions with values on a ``1/value_den`` grid."""
    k = draw(st.integers(1, max_atoms))
    values = draw(st.lists(st.integers(0, max_value * value_den), min_size=k, max_size=k))
    weights = draw(st.lists(st.integers(1, 20), min_size=k, max_size=k))
    total = sum(weights)
    return make_discrete([(Fraction(v, value_den), Fraction(w, total)) for v, w in zip(values, weights)])


positive_rationals = st.fractions(min_value=Fraction(1, 100), max_value=5, max_denominator=50).filter(
    lambda x: x > 0
)


def brute_force_tail(ds, t):
    """P(sum < t) by enumerating every joint outcome of the product measure."""
    total = Fraction(0)
    for combo in itertools.product(*(d.atoms for d in ds)):
        if sum(v for v, _ in combo) < t:
            p = Fraction(1)
            for _, q in combo:
                p *= q
            total += p
    return total


@pytest.fixture
def brute_tail():
    return brute_force_tail
