"""Extremal product laws: the Feige induction family and Samuels' family."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .dist import fmt_rational, make_discrete, to_rational
from .errors import InvalidInput, InvalidSplit, ThresholdTooSmall
from .transform import TwoPoint


@dataclass(frozen=True)
class FeigeExtremal:
    n: int
    delta: Fraction
    component: TwoPoint

    @property
    def threshold(self) -> Fraction:
        return self.n + self.delta

    def distributions(self) -> list:
        return [self.component.to_distribution()] * self.n


def _check_n_delta(n, delta):
    if int(n) != n or n < 1:
        raise InvalidInput(f"n must be a positive integer, got {n}")
    delta = to_rational(delta)
    if delta <= 0:
        raise InvalidInput(f"delta must be positive, got {delta}")
    return int(n), delta


def feige_extremal(n, delta) -> FeigeExtremal:
    n, delta = _check_n_delta(n, delta)
    p0 = (n - 1 + delta) / (n + delta)
    return FeigeExtremal(n, delta, TwoPoint(Fraction(0), n + delta, p0))


def feige_extremal_family(n, delta) -> list:
    """``n`` identical mean-one variables on ``{0, n + delta}``."""
    fam = feige_extremal(n, delta)
    return [fam.component] * fam.n


def feige_extremal_tail(n, delta) -> Fraction:
    """Closed form of ``P(sum < n + delta)`` for the Feige family.

    One variable at its upper atom already puts the sum at ``n + delta``, so
    the strict tail is the chance that all of them sit at 0.
    """
    n, delta = _check_n_delta(n, delta)
    return ((n - 1 + delta) / (n + delta)) ** n


# -- Samuels ------------------------------------------------------------------

def _check_samuels(mus, lam):
    mus = [to_rational(m) for m in mus]
    lam = to_rational(lam)
    if not mus:
        raise InvalidInput("need at least one mean")
    if any(m < 0 for m in mus):
        raise InvalidInput("means must be non-negative")
    if any(a < b for a, b in zip(mus, mus[1:])):
        raise InvalidInput("means must be sorted non-increasing")
    if lam <= sum(mus):
        raise ThresholdTooSmall(f"lambda = {lam} must exceed the sum of means {sum(mus)}",
                                lam=lam, total=sum(mus))
    return mus, lam


def samuels_upper_atom(mus, lam, i) -> Fraction:
    mus, lam = _check_samuels(mus, lam)
    return lam - sum(mus[i:])


def samuels_family(mus: Sequence, lam, i: int) -> list:
    """Distributions of Samuels' configuration with split index ``i`` (1-based).

    Variables after ``i`` are constants at their means; the first ``i`` are
    two-point on ``{0, lam - sum(mus[i:])}`` with the matching mean.
    """
    mus, lam = _check_samuels(mus, lam)
    n = len(mus)
    if int(i) != i or not 1 <= i <= n:
        raise InvalidSplit(f"split index {i} outside 1..{n}", i=i)
    upper = lam - sum(mus[i:])
    out = []
    for j, m in enumerate(mus):
        if j < i:
            q = m / upper
            if q > 1:
                raise InvalidSplit(f"mean {m} exceeds upper atom {upper} at split {i}", i=i)
            out.append(make_discrete([(0, 1 - q), (upper, q)]))
        else:
            out.append(make_discrete([(m, 1)]))
    return out


def samuels_probability(mus: Sequence, lam, i: int) -> Fraction:
    """``P(sum < lam)`` for Samuels' configuration: ``prod_{j<=i} (1 - mu_j / upper)``."""
    mus, lam = _check_samuels(mus, lam)
    n = len(mus)
    if int(i) != i or not 1 <= i <= n:
        raise InvalidSplit(f"split index {i} outside 1..{n}", i=i)
    upper = lam - sum(mus[i:])
    out = Fraction(1)
    for m in mus[:i]:
        q = m / upper
        if q > 1:
            raise InvalidSplit(f"mean {m} exceeds upper atom {upper} at split {i}", i=i)
        out *= 1 - q
    return out


class SamuelsMin(NamedTuple):
    index: int
    probability: Fraction
    minimizers: tuple

    def to_json(self):
        return {
            "i": self.index,
            "probability": fmt_rational(self.probability),
            "probability_decimal": float(self.probability),
            "minimizers": list(self.minimizers),
        }


def samuels_min(mus: Sequence, lam) -> SamuelsMin:
    """Smallest Samuels probability over all feasible split indices.

    ``index`` is the smallest minimizing ``i``; ``minimizers`` lists every
    index attaining the minimum. Infeasible splits are skipped.
    """
    mus, lam = _check_samuels(mus, lam)
    values = {}
    for i in range(1, len(mus) + 1):
        try:
            values[i] = samuels_probability(mus, lam, i)
        except InvalidSplit:
            continue
    if not values:
        raise InvalidSplit("no feasible split index")
    best = min(values.values())
    ties = tuple(i for i, v in values.items() if v == best)
    return SamuelsMin(ties[0], best, ties)


def as_distributions(items) -> list:
    return [x.to_distribution() if isinstance(x, TwoPoint) else x for x in items]

