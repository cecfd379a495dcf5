"""Monte Carlo estimates of ``P(X1 + ... + Xn < mu + delta)`` for continuous models.

Sampling is split into a fixed number of blocks. Block ``k`` draws from its
own PCG64 stream spawned from ``SeedSequence(seed)``, so the estimate depends
only on ``(models, delta, samples, seed)`` and never on how many threads ran.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bounds import feige_bound
from .dist import Distribution, from_json, to_float, to_rational
from .errors import InvalidInput

MEAN_TOL = 1e-12
MIN_SAMPLES = 10_000
N_BLOCKS = 16
CHUNK = 1 << 16

EXPONENTIAL = "exponential"
UNIFORM = "uniform"
LOGNORMAL = "lognormal"
BERNOULLI = "bernoulli"
POINT = "point"
DISCRETE = "discrete"


@dataclass(frozen=True)
class ContinuousModel:
    """A non-negative law with known mean, sampled with numpy.

    Use the constructors; they check the support and the mean <= 1 constraint.
    """

    kind: str
    params: tuple
    mean: float
    dist: Optional[Distribution] = None

    def __post_init__(self):
        if not self.mean <= 1 + MEAN_TOL:
            raise InvalidInput(f"model mean {self.mean} exceeds 1")
        if self.mean < 0:
            raise InvalidInput(f"model mean {self.mean} is negative")

    @classmethod
    def exponential(cls, mean=1.0):
        if mean <= 0:
            raise InvalidInput("exponential mean must be positive")
        return cls(EXPONENTIAL, (float(mean),), float(mean))

    @classmethod
    def uniform(cls, lo, hi):
        lo, hi = float(lo), float(hi)
        if not 0 <= lo < hi:
            raise InvalidInput("uniform needs 0 <= lo < hi")
        return cls(UNIFORM, (lo, hi), (lo + hi) / 2)

    @classmethod
    def lognormal(cls, mean=1.0, sigma=1.0):
        if mean <= 0 or sigma <= 0:
            raise InvalidInput("lognormal needs positive mean and sigma")
        loc = math.log(mean) - sigma * sigma / 2
        return cls(LOGNORMAL, (loc, float(sigma)), float(mean))

    @classmethod
    def bernoulli(cls, mean=1.0, p=0.5):
        """``mean / p`` with probability ``p``, else 0."""
        if not 0 < p <= 1 or mean < 0:
            raise InvalidInput("bernoulli mix needs 0 < p <= 1 and mean >= 0")
        return cls(BERNOULLI, (float(mean) / p, float(p)), float(mean))

    @classmethod
    def point(cls, value):
        value = float(value)
        if value < 0:
            raise InvalidInput("point mass must be non-negative")
        return cls(POINT, (value,), value)

    @classmethod
    def discrete(cls, d: Distribution):
        fd = to_float(d)
        return cls(DISCRETE, (), float(d.mean()), fd)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == EXPONENTIAL:
            return rng.standard_exponential(size) * self.params[0]
        if self.kind == UNIFORM:
            return rng.uniform(self.params[0], self.params[1], size)
        if self.kind == LOGNORMAL:
            return rng.lognormal(self.params[0], self.params[1], size)
        if self.kind == BERNOULLI:
            return np.where(rng.random(size) < self.params[1], self.params[0], 0.0)
        if self.kind == POINT:
            return np.full(size, self.params[0])
        if self.kind == DISCRETE:
            cdf = np.cumsum(self.dist.probs)
            idx = np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right")
            idx = np.minimum(idx, len(cdf) - 1)
            return np.asarray(self.dist.values, dtype=float)[idx]
        raise InvalidInput(f"unknown model kind {self.kind!r}")

    def add_sample(self, rng: np.random.Generator, total: np.ndarray, buf: np.ndarray) -> None:
        """Add one draw per slot of ``total``; ``buf`` is scratch space of equal size."""
        if self.kind == EXPONENTIAL:
            rng.standard_exponential(out=buf)
            if self.params[0] != 1.0:
                buf *= self.params[0]
            total += buf
        else:
            total += self.sample(rng, total.shape[0])

    def to_json(self):
        out = {"kind": self.kind, "mean": self.mean}
        if self.kind == UNIFORM:
            out.update(lo=self.params[0], hi=self.params[1])
        elif self.kind == LOGNORMAL:
            out["sigma"] = self.params[1]
        elif self.kind == BERNOULLI:
            out["p"] = self.params[1]
        elif self.kind == POINT:
            out = {"kind": POINT, "value": self.params[0]}
        elif self.kind == DISCRETE:
            out = {"kind": DISCRETE, "distribution": self.dist.to_json()}
        return out


def model_from_json(spec: dict) -> ContinuousModel:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidInput(f"model spec needs a 'kind': {spec!r}")
    kind = spec["kind"]
    try:
        if kind == EXPONENTIAL:
            return ContinuousModel.exponential(float(spec.get("mean", 1.0)))
        if kind == UNIFORM:
            if "lo" in spec or "hi" in spec:
                return ContinuousModel.uniform(spec.get("lo", 0.0), spec["hi"])
            return ContinuousModel.uniform(0.0, 2 * float(spec.get("mean", 1.0)))
        if kind == LOGNORMAL:
            return ContinuousModel.lognormal(float(spec.get("mean", 1.0)), float(spec.get("sigma", 1.0)))
        if kind == BERNOULLI:
            return ContinuousModel.bernoulli(float(spec.get("mean", 1.0)), float(spec.get("p", 0.5)))
        if kind == POINT:
            return ContinuousModel.point(spec.get("value", spec.get("mean")))
        if kind == DISCRETE:
            return ContinuousModel.discrete(from_json(spec.get("distribution", spec)))
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"bad {kind} model spec: {spec!r}") from exc
    raise InvalidInput(f"unknown model kind {kind!r}")


@dataclass(frozen=True)
class TailEstimate:
    point: float
    std_error: float
    ci95: tuple
    samples: int
    seed: int

    def to_json(self):
        return {
            "estimate": self.point,
            "std_error": self.std_error,
            "ci95": list(self.ci95),
            "samples": self.samples,
            "seed": self.seed,
        }


def _block_sizes(samples: int) -> list:
    base, extra = divmod(samples, N_BLOCKS)
    return [base + (k < extra) for k in range(N_BLOCKS)]


def _count_block(models, threshold, size, seed_seq) -> int:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    hits = 0
    done = 0
    total_buf = np.empty(CHUNK)
    scratch_buf = np.empty(CHUNK)
    while done < size:
        m = min(CHUNK, size - done)
        total, scratch = total_buf[:m], scratch_buf[:m]
        total.fill(0.0)
        for model in models:
            model.add_sample(rng, total, scratch)
        hits += int(np.count_nonzero(total < threshold))
        done += m
    return hits


def estimate_tail(models: Sequence[ContinuousModel], delta: float, samples: int = 1_000_000,
                  seed: int = 0, threads: Optional[int] = None) -> TailEstimate:
    """Estimate ``P(sum < mu + delta)`` with ``mu`` the sum of analytic means."""
    if not models:
        raise InvalidInput("need at least one model")
    if samples < MIN_SAMPLES:
        raise InvalidInput(f"need at least {MIN_SAMPLES} samples, got {samples}")
    delta = float(delta)
    if not delta > 0:
        raise InvalidInput("delta must be positive")
    models = list(models)
    # accumulate in the same order as the per-sample sums below
    mu = 0.0
    for m in models:
        mu += m.mean
    threshold = mu + delta
    children = np.random.SeedSequence(seed).spawn(N_BLOCKS)
    sizes = _block_sizes(samples)
    jobs = [(models, threshold, size, ss) for size, ss in zip(sizes, children)]
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(lambda job: _count_block(*job), jobs))
    else:
        counts = [_count_block(*job) for job in jobs]
    hits = sum(counts)
    p = hits / samples
    se = math.sqrt(p * (1 - p) / samples)
    ci = (max(0.0, p - 1.96 * se), min(1.0, p + 1.96 * se))
    return TailEstimate(p, se, ci, samples, seed)


@dataclass(frozen=True)
class Scenario:
    models: tuple
    delta: float
    samples: int = 1_000_000
    seed: int = 0

    @property
    def n(self):
        return len(self.models)

    @classmethod
    def from_json(cls, spec: dict):
        if not isinstance(spec, dict):
            raise InvalidInput("scenario must be a JSON object")
        if "models" not in spec or "delta" not in spec:
            raise InvalidInput("scenario needs 'models' and 'delta'")
        models = [model_from_json(m) for m in spec["models"]]
        n = spec.get("n")
        if n is not None:
            if len(models) == 1 and n > 1:
                models = models * int(n)
            elif len(models) != n:
                raise InvalidInput(f"scenario n = {n} but {len(models)} models given")
        return cls(tuple(models), float(spec["delta"]), int(spec.get("samples", 1_000_000)),
                   int(spec.get("seed", 0)))


@dataclass(frozen=True)
class PortfolioReport:
    outperform: float
    std_error: float
    bound: float
    margin: float
    verdict: str
    tail: TailEstimate
    delta: float
    n: int

    def to_json(self):
        return {
            "n": self.n,
            "delta": self.delta,
            "estimate": self.outperform,
            "std_error": self.std_error,
            "bound": self.bound,
            "margin": self.margin,
            "verdict": self.verdict,
            "lower_tail": self.tail.to_json(),
        }

    def csv_row(self):
        return {
            "estimate": repr(self.outperform),
            "std_error": repr(self.std_error),
            "bound": repr(self.bound),
            "margin": repr(self.margin),
            "verdict": self.verdict,
        }


def portfolio_sim(scenario: Scenario, threads: Optional[int] = None) -> PortfolioReport:
    """Estimate the chance that the portfolio ends at or above ``mu + delta``.

    The comparison value is ``1 - min(delta/(1+delta), e**-1)``; the verdict is
    ``pass`` when the estimate stays within three standard errors of it.
    """
    tail = estimate_tail(scenario.models, scenario.delta, scenario.samples, scenario.seed, threads)
    outperform = 1.0 - tail.point
    bound = 1.0 - feige_bound(to_rational(scenario.delta)).value
    margin = bound - outperform
    verdict = "pass" if outperform <= bound + 3 * tail.std_error else "violation"
    return PortfolioReport(outperform, tail.std_error, bound, margin, verdict, tail,
                           scenario.delta, scenario.n)
