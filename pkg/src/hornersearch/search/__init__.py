"""Search strategies over Horner variable orders."""

from .baselines import EXHAUSTIVE_CAP, exhaustive_search, occurrence_search
from .common import SearchResult, derive_seed, make_rng
from .evaluate import SchemeEvaluator, check_complete, evaluate_scheme, score_delta
from .mcts import (
    Criterion,
    SearchConfig,
    SearchNode,
    mcts_search,
    sa_uct_temperature,
    uct_best_child,
)
from .nmcs import NmcsConfig, nmcs_eval_count, nmcs_search

__all__ = [
    "EXHAUSTIVE_CAP",
    "Criterion",
    "NmcsConfig",
    "SchemeEvaluator",
    "SearchConfig",
    "SearchNode",
    "SearchResult",
    "check_complete",
    "derive_seed",
    "evaluate_scheme",
    "exhaustive_search",
    "make_rng",
    "mcts_search",
    "nmcs_eval_count",
    "nmcs_search",
    "occurrence_search",
    "sa_uct_temperature",
    "score_delta",
    "uct_best_child",
]
