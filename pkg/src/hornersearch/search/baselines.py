"""Non-random strategies: the occurrence heuristic and exhaustive enumeration."""

from __future__ import annotations

from itertools import permutations
from typing import Optional

from ..expr import Polynomial, occurrence_order
from ..hornerform import Direction, HornerScheme
from .common import SearchResult, evaluator_for
from .evaluate import SchemeEvaluator

__all__ = ["occurrence_search", "exhaustive_search", "EXHAUSTIVE_CAP"]

EXHAUSTIVE_CAP = 8


def occurrence_search(p: Polynomial, direction: Direction = Direction.FORWARD,
                      evaluator: Optional[SchemeEvaluator] = None) -> SearchResult:
    ev = evaluator_for(p, evaluator)
    calls0 = ev.calls
    order = tuple(occurrence_order(p)) if p.terms else ()
    ops, delta = ev.evaluate(order, direction)
    return SearchResult(HornerScheme(order, direction), ops, ev.calls - calls0, delta)


def exhaustive_search(p: Polynomial, direction: Direction = Direction.FORWARD,
                      cap: int = EXHAUSTIVE_CAP,
                      evaluator: Optional[SchemeEvaluator] = None) -> SearchResult:
    """Best of all n! schemes; ties go to the lexicographically smallest order."""
    if p.nvars > cap:
        raise ValueError(
            f"exhaustive search over {p.nvars} variables exceeds the cap of {cap}; "
            "use an MCTS or NMCS strategy instead"
        )
    ev = evaluator_for(p, evaluator)
    calls0 = ev.calls
    best = None
    for order in permutations(range(p.nvars)):  # lexicographic
        ops, delta = ev.evaluate(order, direction)
        if best is None or ops.total < best[1].total:
            best = (order, ops, delta)
    order, ops, delta = best
    return SearchResult(HornerScheme(order, direction), ops, ev.calls - calls0, delta)
