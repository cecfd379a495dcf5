"""Closed-form bounds and the extremal tail sequence.

``e**-1`` is irrational, so every comparison between it and an exact fraction
is decided with a certified rational bracket from the alternating series
``sum((-1)**k / k!)``; floats are only used for reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .dist import fmt_rational, to_rational
from .errors import InvalidInput

EXP_NEG1 = math.exp(-1.0)

DELTA_TERM = "DeltaTerm"
EXP_TERM = "ExpTerm"

INCREASING = "Increasing"
DECREASING = "Decreasing"
NON_MONOTONE = "NonMonotone"

# largest n for which extremal_sequence returns an exact fraction by default
EXACT_SEQUENCE_MAX_N = 5000

REFERENCE_CONSTANTS = {
    "Feige": 0.0769,
    "Garnett": 0.14,
    "Guo": 0.1798,
    "Conjectured": EXP_NEG1,
}


def exp_neg1_bracket(terms: int = 30) -> tuple:
    """Rational ``(lo, hi)`` with ``lo < e**-1 < hi``."""
    if terms < 2:
        raise InvalidInput("need at least two series terms")
    s = Fraction(0)
    fact = 1
    partial = []
    for k in range(terms + 1):
        if k:
            fact *= k
        s += Fraction((-1) ** k, fact)
        partial.append(s)
    a, b = partial[-2], partial[-1]
    return (min(a, b), max(a, b))


def compare_exp_neg1(x) -> int:
    """Sign of ``x - e**-1`` for a rational ``x`` (never 0, e**-1 is irrational)."""
    x = to_rational(x)
    terms = 30
    while True:
        lo, hi = exp_neg1_bracket(terms)
        if x < lo:
            return -1
        if x > hi:
            return 1
        terms *= 2


def single_bound(mu, delta) -> Fraction:
    """``delta / (mu + delta)``: lower bound on ``P(X < mu + delta)`` for one variable."""
    mu, delta = to_rational(mu), to_rational(delta)
    if mu < 0 or delta <= 0:
        raise InvalidInput(f"need mu >= 0 and delta > 0, got mu={mu}, delta={delta}")
    return delta / (mu + delta)


@dataclass(frozen=True)
class BoundReport:
    delta: Fraction
    single_term: Fraction
    exp_term: float
    value: float
    binding: str

    def to_json(self):
        return {
            "delta": fmt_rational(self.delta),
            "single_term": fmt_rational(self.single_term),
            "single_term_decimal": float(self.single_term),
            "exp_term": self.exp_term,
            "value": self.value,
            "binding": self.binding,
        }


def feige_bound(delta) -> BoundReport:
    """``min(delta / (1 + delta), e**-1)`` with the binding term identified.

    The binding label is decided exactly. When the two terms round to the same
    double the tie goes to ``DeltaTerm``.
    """
    delta = to_rational(delta)
    if delta <= 0:
        raise InvalidInput(f"delta must be positive, got {delta}")
    single = delta / (1 + delta)
    single_f = float(single)
    if single_f <= EXP_NEG1 or compare_exp_neg1(single) < 0:
        return BoundReport(delta, single, EXP_NEG1, min(single_f, EXP_NEG1), DELTA_TERM)
    return BoundReport(delta, single, EXP_NEG1, EXP_NEG1, EXP_TERM)


def exceeds_feige_bound(prob, delta) -> bool:
    """True iff the exact ``prob`` is >= ``min(delta/(1+delta), e**-1)``."""
    prob, delta = to_rational(prob), to_rational(delta)
    if prob >= delta / (1 + delta):
        return True
    return compare_exp_neg1(prob) > 0


def extremal_sequence(n: int, delta, exact: Optional[bool] = None):
    """``((n - 1 + delta) / (n + delta)) ** n``.

    Exact fraction for ``n <= EXACT_SEQUENCE_MAX_N`` unless ``exact`` says
    otherwise; for large ``n`` a float computed through ``log1p``.
    """
    if n < 1 or int(n) != n:
        raise InvalidInput(f"n must be a positive integer, got {n}")
    n = int(n)
    delta = to_rational(delta)
    if delta <= 0:
        raise InvalidInput(f"delta must be positive, got {delta}")
    if exact is None:
        exact = n <= EXACT_SEQUENCE_MAX_N
    if exact:
        return ((n - 1 + delta) / (n + delta)) ** n
    return math.exp(n * math.log1p(-1.0 / (n + float(delta))))


@dataclass(frozen=True)
class Regime:
    kind: str
    first_violation: Optional[int] = None

    def to_json(self):
        return {"regime": self.kind, "first_violation": self.first_violation}


def sequence_regime(delta, n_max: int) -> Regime:
    """Classify ``a_n = extremal_sequence(n, delta)`` on ``1 <= n <= n_max``.

    Every consecutive pair is compared exactly. For ``NonMonotone`` the
    reported index is the first ``n`` where ``a_{n+1} - a_n`` has a different
    sign from ``a_2 - a_1`` (or is zero).
    """
    if n_max < 2:
        raise InvalidInput("n_max must be at least 2")
    delta = to_rational(delta)
    if delta <= 0:
        raise InvalidInput(f"delta must be positive, got {delta}")
    prev = extremal_sequence(1, delta, exact=True)
    direction = 0
    for n in range(2, n_max + 1):
        cur = extremal_sequence(n, delta, exact=True)
        step = (cur > prev) - (cur < prev)
        if step == 0:
            return Regime(NON_MONOTONE, n - 1)
        if direction == 0:
            direction = step
        elif step != direction:
            return Regime(NON_MONOTONE, n - 1)
        prev = cur
    return Regime(INCREASING if direction > 0 else DECREASING)


def reference_constants() -> dict:
    """Literature values of the constant in the Feige-type bound."""
    return dict(REFERENCE_CONSTANTS)
