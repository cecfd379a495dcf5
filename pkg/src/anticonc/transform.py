"""Two-point reduction of a non-negative random variable.

A variable ``X`` with mean ``mu`` and ``p = P(X < mu + delta)`` is replaced by
a variable on two points ``alpha < mu + delta <= beta`` that keeps both the
mean and ``p``. Choosing ``alpha = 0`` and ``beta = mu + delta`` gives the
smallest possible ``p`` among such two-point laws, which is where the bound
``delta / (mu + delta)`` comes from.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .dist import Distribution, make_discrete, mean, tail_below, to_rational
from .errors import AlphaInfeasible, DegenerateP, InvalidInput, OutOfRange, ZeroP


@dataclass(frozen=True)
class TwoPoint:
    """``P(X = alpha) = p`` and ``P(X = beta) = 1 - p``.

    With ``p == 1`` the variable is a point mass at ``alpha`` and ``beta`` is
    ignored. ``degenerate`` marks reductions where no mass lies at or above
    the threshold.
    """

    alpha: Fraction
    beta: Optional[Fraction]
    p: Fraction
    degenerate: bool = False

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise InvalidInput(f"two-point probability {self.p} outside (0, 1]")
        if self.alpha < 0:
            raise InvalidInput(f"negative lower atom {self.alpha}")
        if self.p < 1 and (self.beta is None or not self.alpha < self.beta):
            raise InvalidInput(f"need alpha < beta, got {self.alpha}, {self.beta}")

    @property
    def is_point_mass(self):
        return self.p == 1

    def to_distribution(self) -> Distribution:
        if self.is_point_mass:
            return make_discrete([(self.alpha, 1)])
        return make_discrete([(self.alpha, self.p), (self.beta, 1 - self.p)])

    def mean(self) -> Fraction:
        if self.is_point_mass:
            return self.alpha
        return self.alpha * self.p + self.beta * (1 - self.p)

    def tail_below(self, t) -> Fraction:
        return tail_below(self.to_distribution(), t)

    def to_json(self):
        from .dist import fmt_rational

        return {
            "alpha": fmt_rational(self.alpha),
            "beta": None if self.beta is None or self.is_point_mass else fmt_rational(self.beta),
            "p": fmt_rational(self.p),
            "degenerate": self.degenerate,
            "distribution": self.to_distribution().to_json(),
        }


def alpha_upper_limit(mu, delta, p) -> Fraction:
    """Largest lower atom for which the matching upper atom stays >= mu + delta."""
    return mu + delta - delta / p


def reduce(d: Distribution, delta, alpha=0, strict: bool = False) -> TwoPoint:
    """Mean- and tail-preserving two-point reduction of ``d`` at ``mean + delta``.

    ``alpha`` is the lower realisation, default 0. When ``d`` already has all
    its mass below the threshold (``p == 1``) a flagged point mass at the mean
    is returned, or :class:`DegenerateP` raised if ``strict``.
    """
    if not d.is_exact:
        raise InvalidInput("reduce needs an exact-mode distribution")
    delta, alpha = to_rational(delta), to_rational(alpha)
    if delta <= 0:
        raise InvalidInput(f"delta must be positive, got {delta}")
    mu = mean(d)
    t = mu + delta
    p = tail_below(d, t)
    if p == 0:
        raise ZeroP(f"no mass below mean + delta = {t}; no two-point reduction exists", threshold=t)
    if p == 1:
        if strict:
            raise DegenerateP(f"all mass lies below {t}", threshold=t)
        return TwoPoint(mu, None, Fraction(1), degenerate=True)
    limit = alpha_upper_limit(mu, delta, p)
    if alpha < 0 or alpha >= t or alpha > limit:
        raise AlphaInfeasible(
            f"alpha = {alpha} infeasible: need 0 <= alpha <= {limit} (mu + delta - delta/p)",
            alpha=alpha, limit=limit,
        )
    beta = (mu - alpha * p) / (1 - p)
    return TwoPoint(alpha, beta, p)


def p_of(alpha, beta, mu) -> Fraction:
    """Probability at ``alpha`` of the two-point law on ``{alpha, beta}`` with mean ``mu``."""
    alpha, beta, mu = to_rational(alpha), to_rational(beta), to_rational(mu)
    if alpha < 0 or not alpha < beta:
        raise OutOfRange(f"need 0 <= alpha < beta, got alpha={alpha}, beta={beta}")
    if not alpha <= mu <= beta:
        raise OutOfRange(f"mean {mu} outside [{alpha}, {beta}]", mu=mu)
    return (beta - mu) / (beta - alpha)


def minimizer(mu, delta) -> TwoPoint:
    mu, delta = to_rational(mu), to_rational(delta)
    if mu < 0 or delta <= 0:
        raise InvalidInput(f"need mu >= 0 and delta > 0, got mu={mu}, delta={delta}")
    return TwoPoint(Fraction(0), mu + delta, delta / (mu + delta))


def conditional_pair_transform(mu1, mu2, delta, x2) -> TwoPoint:
    """Two-point replacement of ``X1`` given the realisation ``X2 = x2``.

    Atoms ``{0, r}`` with ``r = mu2 + delta - x2`` and ``P(0) = r / (mu1 + r)``;
    a point mass at 0 once ``x2 >= mu2 + delta``. This law does not keep the
    mean of ``X1``; it is reproduced as stated, not corrected.
    """
    mu1, mu2, delta, x2 = (to_rational(v) for v in (mu1, mu2, delta, x2))
    if mu1 < 0 or mu2 < 0 or delta <= 0 or x2 < 0:
        raise InvalidInput("need mu1, mu2, x2 >= 0 and delta > 0")
    r = mu2 + delta - x2
    if r <= 0:
        return TwoPoint(Fraction(0), None, Fraction(1))
    p0 = r / (mu1 + r)
    if p0 == 1:
        return TwoPoint(Fraction(0), None, Fraction(1))
    return TwoPoint(Fraction(0), r, p0)
