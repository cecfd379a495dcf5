"""Numerical audit of the Feige-type bound.

``min_tail_search`` minimizes ``P(X1 + ... + Xn < mu + delta)`` over product
laws with fixed means and grid-supported coordinates by cyclic best responses.
With the other coordinates fixed the objective is linear in the law of ``Xi``,
and the mean constraint is a single linear equation, so an optimal law has at
most two atoms; each best response enumerates grid pairs exactly.

``random_instance_audit`` evaluates the exact strict tail of many random
instances against the bound. Neither certifies anything about off-grid laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .bounds import exceeds_feige_bound, feige_bound
from .convolve import ConvolutionBudget, pruned_sum, sum_tail_below
from .dist import Distribution, fmt_rational, make_discrete, mean, to_rational
from .errors import InfeasibleMean, InvalidInput
from .extremal import feige_extremal, samuels_family

MAX_N = 12


def make_grid(step, upper) -> tuple:
    step, upper = to_rational(step), to_rational(upper)
    if step <= 0:
        raise InvalidInput(f"grid step must be positive, got {step}")
    if upper < 0:
        raise InvalidInput(f"grid upper bound must be non-negative, got {upper}")
    return tuple(k * step for k in range(math.floor(upper / step) + 1))


@dataclass(frozen=True)
class SearchConfig:
    n: int
    means: tuple
    delta: Fraction
    grid_step: Fraction
    grid_max: Fraction
    max_rounds: int = 50
    tol: float = 1e-12
    seed: int = 0
    starts: int = 8
    extremal_starts: bool = True
    max_n: int = MAX_N

    def __post_init__(self):
        object.__setattr__(self, "means", tuple(to_rational(m) for m in self.means))
        for name in ("delta", "grid_step", "grid_max"):
            object.__setattr__(self, name, to_rational(getattr(self, name)))
        if self.n < 1 or len(self.means) != self.n:
            raise InvalidInput(f"need n >= 1 and exactly n means, got n={self.n}, {len(self.means)} means")
        if self.n > self.max_n:
            raise InvalidInput(f"n = {self.n} above the guard max_n = {self.max_n}")
        if any(not 0 < m <= 1 for m in self.means):
            raise InvalidInput("means must lie in (0, 1]")
        if self.delta <= 0:
            raise InvalidInput("delta must be positive")
        if self.max_rounds < 1 or self.starts < 1:
            raise InvalidInput("max_rounds and starts must be >= 1")
        grid = self.grid
        for m in self.means:
            if grid[-1] < m + self.delta:
                raise InvalidInput(f"grid max {self.grid_max} has no point >= mean + delta = {m + self.delta}")

    @classmethod
    def uniform(cls, n, delta, grid_step, grid_max=None, mean=1, **kw):
        delta = to_rational(delta)
        if grid_max is None:
            grid_max = n + delta + 1
        return cls(n, (to_rational(mean),) * n, delta, grid_step, grid_max, **kw)

    @property
    def grid(self) -> tuple:
        return make_grid(self.grid_step, self.grid_max)

    @property
    def threshold(self) -> Fraction:
        return sum(self.means) + self.delta

    def to_json(self):
        return {
            "n": self.n,
            "means": [fmt_rational(m) for m in self.means],
            "delta": fmt_rational(self.delta),
            "grid_step": fmt_rational(self.grid_step),
            "grid_max": fmt_rational(self.grid_max),
            "max_rounds": self.max_rounds,
            "tol": self.tol,
            "seed": self.seed,
            "starts": self.starts,
            "extremal_starts": self.extremal_starts,
        }


@dataclass
class SearchResult:
    distributions: list
    objective: Fraction
    rounds: int
    converged: bool
    trace: list
    start: int = 0
    round_limit: bool = False
    config: Optional[SearchConfig] = None

    def to_json(self):
        out = {
            "objective": fmt_rational(self.objective),
            "objective_decimal": float(self.objective),
            "rounds": self.rounds,
            "converged": self.converged,
            "round_limit": self.round_limit,
            "start": self.start,
            "trace": [fmt_rational(v) for v in self.trace],
            "trace_decimal": [float(v) for v in self.trace],
            "distributions": [d.to_json() for d in self.distributions],
        }
        if self.config is not None:
            out["config"] = self.config.to_json()
            report = feige_bound(self.config.delta)
            out["feige_bound"] = report.value
            out["margin"] = float(self.objective) - report.value
        return out


def _two_point(a, b, mu) -> Distribution:
    if a == b:
        return make_discrete([(a, 1)])
    q = (b - mu) / (b - a)
    return make_discrete([(a, q), (b, 1 - q)])


def _best_pair(others_sum, mu, grid):
    """Exact optimum over grid pairs ``a <= mu <= b``; ties keep the smallest ``(a, b)``."""
    t = others_sum.threshold
    low = [a for a in grid if a <= mu]
    high = [b for b in grid if b >= mu]
    if not low or not high:
        raise InfeasibleMean(f"no grid pair brackets mean {mu}", mean=mu)
    # P(S < t - x) for x >= 0; a shift at or above t leaves nothing below
    f_low = [others_sum.cdf_strict(t - a) if a < t else Fraction(0) for a in low]
    f_high = [others_sum.cdf_strict(t - b) if b < t else Fraction(0) for b in high]
    best = None
    for a, fa in zip(low, f_low):
        for b, fb in zip(high, f_high):
            if a == b:
                val = fa
            else:
                q = (b - mu) / (b - a)
                val = fb + q * (fa - fb)
            if best is None or val < best[0]:
                best = (val, a, b)
    return best


def best_response(i: int, others: Sequence[Distribution], mean_i, delta, grid,
                  budget: Optional[ConvolutionBudget] = None) -> Distribution:
    """Optimal grid-supported law for coordinate ``i`` with mean ``mean_i``.

    ``others`` are the fixed laws of the remaining coordinates; the threshold
    is ``mean_i + sum of their means + delta``. ``i`` is only used in messages.
    """
    mu = to_rational(mean_i)
    delta = to_rational(delta)
    t = mu + sum((mean(d) for d in others), Fraction(0)) + delta
    try:
        _, a, b = _best_pair(pruned_sum(list(others), t, budget), mu, grid)
    except InfeasibleMean as exc:
        raise InfeasibleMean(f"coordinate {i}: {exc}", mean=mu) from None
    return _two_point(a, b, mu)


def _random_start(rng, means, grid):
    out = []
    for mu in means:
        low = [a for a in grid if a <= mu]
        high = [b for b in grid if b >= mu]
        if not low or not high:
            raise InfeasibleMean(f"no grid pair brackets mean {mu}", mean=mu)
        a = low[int(rng.integers(len(low)))]
        b = high[int(rng.integers(len(high)))]
        out.append(_two_point(a, b, mu))
    return out


def _extremal_starts(config: SearchConfig) -> list:
    """Samuels configurations at ``lambda = mu + delta`` whose atoms lie on the grid.

    The split ``i = n`` with unit means is the Feige family. Coordinates are
    ranked by decreasing mean (stable) and mapped back to their positions.
    """
    on_grid = set(config.grid)
    order = sorted(range(config.n), key=lambda k: -config.means[k])
    mus = [config.means[k] for k in order]
    lam = config.threshold
    out = []
    for i in range(1, config.n + 1):
        upper = lam - sum(mus[i:])
        if upper not in on_grid or any(m not in on_grid for m in mus[i:]):
            continue
        fam = samuels_family(mus, lam, i)
        dists = [None] * config.n
        for rank, k in enumerate(order):
            dists[k] = fam[rank]
        out.append(dists)
    return out


def _run_start(config: SearchConfig, start: int, budget, initial=None) -> SearchResult:
    grid = config.grid
    t = config.threshold
    if initial is None:
        rng = np.random.default_rng([config.seed, start])
        dists = _random_start(rng, config.means, grid)
    else:
        dists = list(initial)
    current = sum_tail_below(dists, t, budget)
    trace = [current]
    converged = False
    rounds = 0
    while rounds < config.max_rounds:
        rounds += 1
        for i in range(config.n):
            others = dists[:i] + dists[i + 1:]
            _, a, b = _best_pair(pruned_sum(others, t, budget), config.means[i], grid)
            dists[i] = _two_point(a, b, config.means[i])
        new = sum_tail_below(dists, t, budget)
        if new > current:
            raise AssertionError("best response increased the objective")
        trace.append(new)
        improvement = current - new
        current = new
        if improvement < config.tol:
            converged = True
            break
    return SearchResult(dists, current, rounds, converged, trace, start,
                        round_limit=not converged, config=config)


def min_tail_search(config: SearchConfig, budget: Optional[ConvolutionBudget] = None) -> SearchResult:
    """Multi-start cyclic best-response minimization of the strict tail.

    Random starts ``0 .. starts-1`` draw a feasible two-point law per
    coordinate from their own seeded stream. With ``extremal_starts`` the
    grid-representable Samuels configurations follow as further starts, so the
    result never exceeds their tails. The best start wins; ties go to the
    lower start index.
    """
    initials = [None] * config.starts
    if config.extremal_starts:
        initials += _extremal_starts(config)
    best = None
    for s, initial in enumerate(initials):
        res = _run_start(config, s, budget, initial)
        if best is None or res.objective < best.objective:
            best = res
    check = sum_tail_below(best.distributions, config.threshold, budget)
    if check != best.objective:
        raise AssertionError("search objective failed exact re-verification")
    return best


# -- random audit -------------------------------------------------------------

@dataclass
class AuditReport:
    trials: int
    seed: int
    n_max: int
    delta_range: tuple
    violations: list = field(default_factory=list)
    min_margin: float = math.inf
    min_margin_instance: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self):
        return {
            "trials": self.trials,
            "seed": self.seed,
            "n_max": self.n_max,
            "delta_range": [fmt_rational(d) for d in self.delta_range],
            "violations": self.violations,
            "violation_count": len(self.violations),
            "min_margin": self.min_margin,
            "min_margin_instance": self.min_margin_instance,
            "verdict": "pass" if self.ok else "violation",
        }


def audit_instance(ds: Sequence[Distribution], delta, budget=None) -> tuple:
    """``(tail, margin, holds)`` for one instance, with the threshold at mean + delta.

    ``holds`` is decided exactly; ``margin`` is ``float(tail) - bound``.
    """
    delta = to_rational(delta)
    t = sum((mean(d) for d in ds), Fraction(0)) + delta
    tail = sum_tail_below(ds, t, budget)
    return tail, float(tail) - feige_bound(delta).value, exceeds_feige_bound(tail, delta)


_AUDIT_VALUE_DEN = 4
_AUDIT_VALUE_MAX = 16  # values k/4 for k <= 16
_AUDIT_DELTA_DEN = 1000


def _random_variable(rng) -> Distribution:
    target = Fraction(int(rng.integers(0, 9)), 8)
    k = int(rng.integers(1, 5))
    vals = [Fraction(int(v), _AUDIT_VALUE_DEN) for v in rng.integers(0, _AUDIT_VALUE_MAX + 1, size=k)]
    weights = [int(w) for w in rng.integers(1, 11, size=k)]
    total = sum(weights)
    atoms = [(v, Fraction(w, total)) for v, w in zip(vals, weights)]
    m = sum(v * p for v, p in atoms)
    if m > target:
        # mixing with a point mass at 0 lowers the mean onto the target
        s = target / m
        atoms = [(v, p * s) for v, p in atoms] + [(Fraction(0), 1 - s)]
    return make_discrete(atoms)


def _random_instance(rng, n_max, delta_lo, delta_hi):
    n = int(rng.integers(1, n_max + 1))
    lo = math.ceil(delta_lo * _AUDIT_DELTA_DEN)
    hi = math.floor(delta_hi * _AUDIT_DELTA_DEN)
    delta = Fraction(int(rng.integers(lo, hi + 1)), _AUDIT_DELTA_DEN)
    kind = rng.random()
    if kind < 0.1:
        return "feige", feige_extremal(n, delta).distributions(), delta
    if kind < 0.2:
        # one variable at the single-variable minimizer, the rest constant
        ds = [make_discrete([(0, delta / (1 + delta)), (1 + delta, 1 / (1 + delta))])]
        ds += [make_discrete([(1, 1)])] * (n - 1)
        return "minimizer", ds, delta
    return "random", [_random_variable(rng) for _ in range(n)], delta


def random_instance_audit(trials: int, n_max: int = 5, delta_range=(Fraction(1, 20), Fraction(3)),
                          seed: int = 0, budget=None) -> AuditReport:
    """Check the bound on ``trials`` random exact instances with means <= 1.

    Instances mix random discrete laws (values on a 1/4 grid, pulled onto a
    random mean by mixing with 0) with Feige and single-minimizer families.
    Violations carry the full instance for reproduction.
    """
    if trials < 1:
        raise InvalidInput("audit needs at least one trial")
    if n_max < 1 or n_max > MAX_N:
        raise InvalidInput(f"n_max must lie in 1..{MAX_N}")
    lo, hi = (to_rational(d) for d in delta_range)
    if not 0 < lo <= hi:
        raise InvalidInput("delta range must satisfy 0 < lo <= hi")
    if math.floor(hi * _AUDIT_DELTA_DEN) < math.ceil(lo * _AUDIT_DELTA_DEN):
        raise InvalidInput(f"delta range narrower than the sampling step 1/{_AUDIT_DELTA_DEN}")
    rng = np.random.default_rng(seed)
    report = AuditReport(trials, seed, n_max, (lo, hi))
    for trial in range(trials):
        kind, ds, delta = _random_instance(rng, n_max, lo, hi)
        tail, margin, holds = audit_instance(ds, delta, budget)
        if margin < report.min_margin or not holds:
            instance = {
                "trial": trial,
                "kind": kind,
                "delta": fmt_rational(delta),
                "tail": fmt_rational(tail),
                "margin": margin,
                "distributions": [d.to_json() for d in ds],
            }
            if margin < report.min_margin:
                report.min_margin = margin
                report.min_margin_instance = instance
            if not holds:
                report.violations.append(instance)
    return report
