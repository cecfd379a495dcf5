"""Finite discrete distributions on the non-negative reals.

Values and probabilities are :class:`fractions.Fraction` in exact mode, so
an atom sitting exactly on a threshold is never misclassified by rounding.
Float mode keeps plain floats and exists for Monte Carlo interop only.
"""

from __future__ import annotations

import json
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Union

from .errors import InvalidInput, MassNotOne, NegativeValue, NonPositiveProb

Rational = Fraction
Number = Union[int, float, str, Fraction]

EXACT = "exact"
FLOAT = "float"
FLOAT_MASS_TOL = 1e-12


def to_rational(x: Number) -> Fraction:
    """Convert ``x`` to an exact fraction.

    Strings may be integers, decimals (``"0.5"``), scientific notation or
    ``"a/b"``. Floats are read through their shortest repr, so ``0.1`` becomes
    ``1/10`` rather than the nearest binary fraction.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InvalidInput(f"not a number: {x!r}")
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            raise InvalidInput(f"not a finite number: {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"cannot parse rational {x!r}") from exc
    raise InvalidInput(f"not a number: {x!r}")


def fmt_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Distribution:
    """Canonical finite distribution: strictly increasing values, positive probs."""

    values: tuple
    probs: tuple
    mode: str = EXACT

    def __len__(self):
        return len(self.values)

    @property
    def atoms(self):
        return list(zip(self.values, self.probs))

    @property
    def is_exact(self):
        return self.mode == EXACT

    def mean(self):
        return mean(self)

    def tail_below(self, t):
        return tail_below(self, t)

    def prob_at(self, t):
        i = bisect_left(self.values, t)
        if i < len(self.values) and self.values[i] == t:
            return self.probs[i]
        return Fraction(0) if self.is_exact else 0.0

    def to_json(self):
        if self.is_exact:
            atoms = [{"v": fmt_rational(v), "p": fmt_rational(p)} for v, p in self.atoms]
        else:
            atoms = [{"v": repr(float(v)), "p": repr(float(p))} for v, p in self.atoms]
        return {"type": "discrete", "atoms": atoms}


def make_discrete(atoms: Iterable[tuple], mode: str = EXACT) -> Distribution:
    """Build a canonical distribution from ``(value, prob)`` pairs.

    Duplicate values are merged and zero-probability atoms dropped. Raises
    :class:`NegativeValue`, :class:`NonPositiveProb` or :class:`MassNotOne`.
    """
    if mode not in (EXACT, FLOAT):
        raise InvalidInput(f"unknown mode {mode!r}")
    conv = to_rational if mode == EXACT else float
    merged: dict = {}
    for pair in atoms:
        try:
            v, p = pair
        except (TypeError, ValueError) as exc:
            raise InvalidInput(f"atom must be a (value, prob) pair, got {pair!r}") from exc
        v, p = conv(v), conv(p)
        if v < 0:
            raise NegativeValue(f"negative value {v}", value=v)
        if p < 0:
            raise NonPositiveProb(f"negative probability {p} at value {v}", value=v, prob=p)
        if p == 0:
            continue
        merged[v] = merged.get(v, 0) + p
    if not merged:
        raise NonPositiveProb("distribution has no atom with positive probability")
    total = sum(merged.values())
    if mode == EXACT:
        if total != 1:
            raise MassNotOne(f"total mass {total} != 1 (deviation {total - 1})", deviation=total - 1)
    elif abs(total - 1.0) > FLOAT_MASS_TOL:
        raise MassNotOne(f"total mass {total!r} deviates from 1 by {total - 1.0:.3e}",
                         deviation=total - 1.0)
    keys = sorted(merged)
    return Distribution(tuple(keys), tuple(merged[k] for k in keys), mode)


def point_mass(v: Number) -> Distribution:
    return make_discrete([(v, 1)])


def mean(d: Distribution):
    return sum((v * p for v, p in d.atoms), Fraction(0) if d.is_exact else 0.0)


def tail_below(d: Distribution, t) -> Fraction:
    """Exact ``P(X < t)``; an atom located exactly at ``t`` is excluded."""
    if d.is_exact:
        t = to_rational(t)
    k = bisect_left(d.values, t)
    return sum(d.probs[:k], Fraction(0) if d.is_exact else 0.0)


def tail_at_most(d: Distribution, t) -> Fraction:
    if d.is_exact:
        t = to_rational(t)
    k = bisect_right(d.values, t)
    return sum(d.probs[:k], Fraction(0) if d.is_exact else 0.0)


def to_float(d: Distribution) -> Distribution:
    if not d.is_exact:
        return d
    return Distribution(tuple(float(v) for v in d.values), tuple(float(p) for p in d.probs), FLOAT)


# -- JSON ---------------------------------------------------------------------

def from_json(spec, mode: str = EXACT) -> Distribution:
    """Parse ``{"type": "discrete", "atoms": [{"v": ..., "p": ...}, ...]}``."""
    if isinstance(spec, str):
        spec = json.loads(spec)
    if not isinstance(spec, dict):
        raise InvalidInput("distribution spec must be a JSON object")
    kind = spec.get("type", "discrete")
    if kind != "discrete":
        raise InvalidInput(f"unsupported distribution type {kind!r}")
    atoms = spec.get("atoms")
    if not isinstance(atoms, list):
        raise InvalidInput("distribution spec needs an 'atoms' list")
    pairs = []
    for a in atoms:
        if isinstance(a, dict):
            if "v" not in a or "p" not in a:
                raise InvalidInput(f"atom missing 'v' or 'p': {a!r}")
            pairs.append((a["v"], a["p"]))
        elif isinstance(a, (list, tuple)) and len(a) == 2:
            pairs.append(tuple(a))
        else:
            raise InvalidInput(f"bad atom {a!r}")
    if mode == FLOAT:
        pairs = [(float(to_rational(v)), float(to_rational(p))) for v, p in pairs]
    return make_discrete(pairs, mode)


def parse_distributions(obj, mode: str = EXACT) -> list:
    """Accept a single spec, a list of specs, or ``{"distributions": [...]}``."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if isinstance(obj, dict) and "distributions" in obj:
        obj = obj["distributions"]
    if isinstance(obj, dict):
        return [from_json(obj, mode)]
    if isinstance(obj, list):
        return [from_json(o, mode) for o in obj]
    raise InvalidInput("expected a distribution spec or a list of them")

