"""Nested Monte Carlo search over variable orders.

A level-0 search is one uniformly random completion of the order.  A level-k
search walks from the given prefix to a complete order; at every step each
remaining variable is scored by a level-(k-1) search from the extended
prefix and the best-scoring one is appended.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..expr import Polynomial
from ..hornerform import Direction, HornerScheme
from .common import SearchResult, evaluator_for, make_rng
from .evaluate import SchemeEvaluator

__all__ = ["NmcsConfig", "nmcs_search", "nmcs_eval_count"]


@dataclass(frozen=True)
class NmcsConfig:
    level: int = 1
    seed: int = 0
    direction: Direction = Direction.FORWARD

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        if self.level < 1:
            raise ValueError(f"NMCS level must be >= 1, got {self.level}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def nmcs_eval_count(n: int, k: int) -> int:
    """Unsigned Stirling number of the first kind c(n+k, n), exact."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    # row[b] holds c(a, b) for the current a, b <= n
    row = [1] + [0] * n
    for a in range(1, n + k + 1):
        new = [0] * (n + 1)
        for b in range(1, n + 1):
            new[b] = row[b - 1] + (a - 1) * row[b]
        row = new
    return row[n]


def nmcs_search(p: Polynomial, cfg: NmcsConfig,
                evaluator: Optional[SchemeEvaluator] = None) -> SearchResult:
    ev = evaluator_for(p, evaluator)
    rng = make_rng(cfg.seed)
    nvars = p.nvars
    calls0 = ev.calls
    best: list = [None, None, 0.0]  # order, ops, delta

    def score(order: list[int]) -> int:
        ops, delta = ev.evaluate(order, cfg.direction)
        if best[1] is None or ops.total < best[1].total:
            best[:] = [order, ops, delta]
        return ops.total

    def playout(prefix: list[int]) -> int:
        taken = set(prefix)
        rest = [u for u in range(nvars) if u not in taken]
        return score(prefix + [rest[k] for k in rng.permutation(len(rest))])

    def nested(level: int, prefix: list[int]) -> int:
        if level == 0 or len(prefix) == nvars:
            return playout(prefix)
        prefix = list(prefix)
        last = 0
        while len(prefix) < nvars:
            taken = set(prefix)
            choice, last = -1, 0
            for v in range(nvars):  # ascending ids: ties keep the lowest
                if v in taken:
                    continue
                s = nested(level - 1, prefix + [v])
                if choice < 0 or s < last:
                    choice, last = v, s
            prefix.append(choice)
        return last

    if nvars == 0:
        score([])
    else:
        nested(cfg.level, [])
    order, ops, delta = best
    return SearchResult(
        HornerScheme(tuple(order), cfg.direction), ops, ev.calls - calls0, delta
    )
