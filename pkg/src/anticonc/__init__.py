"""Exact and numerical checks of Feige-type anti-concentration bounds for sums
of independent non-negative random variables."""

from .bounds import (
    BoundReport,
    exceeds_feige_bound,
    extremal_sequence,
    feige_bound,
    reference_constants,
    sequence_regime,
    single_bound,
)
from .convolve import ConvolutionBudget, convolve, pruned_sum, sum_tail_below
from .dist import Distribution, make_discrete, mean, tail_below, to_rational
from .extremal import (
    feige_extremal_family,
    feige_extremal_tail,
    samuels_family,
    samuels_min,
    samuels_probability,
)
from .montecarlo import ContinuousModel, TailEstimate, estimate_tail, portfolio_sim
from .search import SearchConfig, SearchResult, best_response, min_tail_search, random_instance_audit
from .transform import TwoPoint, conditional_pair_transform, minimizer, p_of, reduce

__version__ = "0.1.0"
