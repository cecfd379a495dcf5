"""Exact laws of sums of independent finite distributions.

``sum_tail_below`` folds the summands one at a time and moves every partial
sum that already reached the threshold into a single absorbing bucket. All
summands are non-negative, so that mass can never come back below the
threshold, and the number of live atoms stays bounded by the number of
distinct partial sums below it.
"""

from __future__ import annotations

import os
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .dist import Distribution, to_rational
from .errors import BudgetExceeded, InvalidInput

DEFAULT_MAX_ATOMS = 10**7
MAX_ATOMS_ENV = "ANTICONC_MAX_ATOMS"


def default_max_atoms() -> int:
    raw = os.environ.get(MAX_ATOMS_ENV)
    if raw is None:
        return DEFAULT_MAX_ATOMS
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidInput(f"{MAX_ATOMS_ENV}={raw!r} is not an integer") from exc
    if value < 1:
        raise InvalidInput(f"{MAX_ATOMS_ENV} must be >= 1")
    return value


@dataclass(frozen=True)
class ConvolutionBudget:
    max_atoms: int = DEFAULT_MAX_ATOMS
    prune_threshold: Optional[Fraction] = None

    def __post_init__(self):
        if self.max_atoms < 1:
            raise InvalidInput("max_atoms must be >= 1")

    @classmethod
    def from_env(cls, prune_threshold=None):
        return cls(default_max_atoms(), prune_threshold)


def _require_exact(ds):
    for d in ds:
        if not d.is_exact:
            raise InvalidInput("exact convolution needs exact-mode distributions")


def _budget(budget):
    return budget if budget is not None else ConvolutionBudget.from_env()


def convolve(d1: Distribution, d2: Distribution, budget: Optional[ConvolutionBudget] = None) -> Distribution:
    """Law of ``X1 + X2`` for independent ``X1 ~ d1``, ``X2 ~ d2``."""
    _require_exact((d1, d2))
    limit = _budget(budget).max_atoms
    acc: dict = {}
    for v, p in zip(d1.values, d1.probs):
        for w, q in zip(d2.values, d2.probs):
            s = v + w
            if s in acc:
                acc[s] += p * q
            else:
                if len(acc) >= limit:
                    raise BudgetExceeded(f"convolution exceeds {limit} atoms", max_atoms=limit)
                acc[s] = p * q
    keys = sorted(acc)
    return Distribution(tuple(keys), tuple(acc[k] for k in keys))


def convolve_all(ds: Sequence[Distribution], budget: Optional[ConvolutionBudget] = None) -> Distribution:
    if not ds:
        raise InvalidInput("need at least one distribution")
    _require_exact(ds)
    out = ds[0]
    for d in ds[1:]:
        out = convolve(out, d, budget)
    return out


@dataclass(frozen=True)
class PrunedSum:
    """Partial-sum law restricted to values below ``threshold``.

    ``values``/``probs`` hold the live atoms; ``absorbed`` is the mass at or
    above the threshold. ``prefix[k]`` is the mass of the first ``k`` atoms.
    """

    threshold: Fraction
    values: tuple
    probs: tuple
    absorbed: Fraction
    prefix: tuple

    @property
    def below(self) -> Fraction:
        return self.prefix[-1]

    def cdf_strict(self, x) -> Fraction:
        """``P(S < x)``, valid for ``x <= threshold``."""
        if x > self.threshold:
            raise InvalidInput(f"query {x} above pruning threshold {self.threshold}")
        return self.prefix[bisect_left(self.values, x)]


def _fold_order(ds):
    # ascending atom count; stable, so equal sizes keep input order
    return sorted(range(len(ds)), key=lambda k: len(ds[k]))


def pruned_sum(ds: Sequence[Distribution], t, budget: Optional[ConvolutionBudget] = None,
               check_mass: bool = False) -> PrunedSum:
    """Law of ``sum(ds)`` below ``t`` plus the absorbed mass at or above ``t``.

    An empty ``ds`` is the point mass at 0.
    """
    _require_exact(ds)
    t = to_rational(t)
    if t <= 0:
        raise InvalidInput(f"threshold must be positive, got {t}")
    limit = _budget(budget).max_atoms
    live = {Fraction(0): Fraction(1)}
    absorbed = Fraction(0)
    for k in _fold_order(ds):
        d = ds[k]
        suffix = [Fraction(0)] * (len(d) + 1)
        for j in range(len(d) - 1, -1, -1):
            suffix[j] = suffix[j + 1] + d.probs[j]
        nxt: dict = {}
        for v, p in live.items():
            for j, w in enumerate(d.values):
                s = v + w
                if s < t:
                    q = p * d.probs[j]
                    if s in nxt:
                        nxt[s] += q
                    else:
                        if len(nxt) >= limit:
                            raise BudgetExceeded(f"partial sums exceed {limit} atoms below {t}",
                                                 max_atoms=limit)
                        nxt[s] = q
                else:
                    # values are sorted, every later w lands at or above t too
                    absorbed += p * suffix[j]
                    break
        live = nxt
        if check_mass and sum(live.values()) + absorbed != 1:
            raise AssertionError("mass not conserved while pruning")
    keys = sorted(live)
    probs = tuple(live[k] for k in keys)
    prefix = [Fraction(0)]
    for q in probs:
        prefix.append(prefix[-1] + q)
    return PrunedSum(t, tuple(keys), probs, absorbed, tuple(prefix))


def sum_tail_below(ds: Sequence[Distribution], t, budget: Optional[ConvolutionBudget] = None) -> Fraction:
    """Exact ``P(X1 + ... + Xn < t)`` for independent ``Xi ~ ds[i]``."""
    if not ds:
        raise InvalidInput("need at least one distribution")
    return pruned_sum(ds, t, budget).below
