"""Monte Carlo tree search over variable orders, with UCT or SA-UCT selection.

Each tree level fixes the next variable of the scheme.  One iteration runs
selection, expansion of one random untried child, a uniformly random
completion of the order, evaluation and backpropagation.  The best complete
scheme ever evaluated is returned, not the most visited root child.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..expr import Polynomial
from ..hornerform import Direction, HornerScheme
from .common import SearchResult, evaluator_for, make_rng
from .evaluate import SchemeEvaluator

__all__ = [
    "Criterion",
    "SearchConfig",
    "SearchNode",
    "uct_best_child",
    "sa_uct_temperature",
    "mcts_search",
]


class Criterion(str, Enum):
    UCT = "uct"
    SA_UCT = "sa-uct"


@dataclass(frozen=True)
class SearchConfig:
    criterion: Criterion = Criterion.UCT
    cp: float = 0.5
    iterations: int = 1000
    direction: Direction = Direction.FORWARD
    seed: int = 0
    trace: bool = False

    def __post_init__(self):
        object.__setattr__(self, "criterion", Criterion(self.criterion))
        object.__setattr__(self, "direction", Direction(self.direction))
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not self.cp >= 0:
            raise ValueError(f"C_p must be >= 0, got {self.cp}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(eq=False)
class SearchNode:
    variable: Optional[int]
    untried: list[int]
    children: list["SearchNode"] = field(default_factory=list)
    visits: int = 0
    score_sum: float = 0.0
    scores: int = 0  # backpropagations; differs from visits only at the root

    @property
    def mean_score(self) -> float:
        return self.score_sum / self.scores if self.scores else 0.0

    @property
    def expanded(self) -> bool:
        return not self.untried

    @property
    def terminal(self) -> bool:
        return not self.untried and not self.children


def uct_best_child(node: SearchNode, c: float) -> SearchNode:
    """argmax of ``mean + 2 c sqrt(2 ln n(parent) / n(child))``.

    Ties go to the child with the lowest variable id.
    """
    if node.untried or not node.children:
        raise ValueError("UCT selection needs a fully expanded node with children")
    log_n = math.log(node.visits)
    best = None
    best_value = -math.inf
    for child in sorted(node.children, key=lambda ch: ch.variable):
        if child.visits < 1:
            raise ValueError("UCT selection needs every child visited at least once")
        value = child.mean_score + 2.0 * c * math.sqrt(2.0 * log_n / child.visits)
        if value > best_value:
            best, best_value = child, value
    return best


def sa_uct_temperature(cp: float, i: int, n: int) -> float:
    """Linearly decreasing exploration weight ``cp * (n - i) / n``."""
    if n < 1:
        raise ValueError("N must be >= 1")
    if not 0 <= i <= n:
        raise ValueError(f"iteration {i} outside [0, {n}]")
    return cp * (n - i) / n


def mcts_search(p: Polynomial, cfg: SearchConfig,
                evaluator: Optional[SchemeEvaluator] = None) -> SearchResult:
    ev = evaluator_for(p, evaluator)
    rng = make_rng(cfg.seed)
    nvars = p.nvars
    calls0 = ev.calls
    n_iter = cfg.iterations
    sa = cfg.criterion is Criterion.SA_UCT

    # counted as visited once so ln n(root) is defined on the first selection
    root = SearchNode(None, list(range(nvars)), visits=1)
    best_order = None
    best_ops = None
    best_delta = 0.0
    trace = [] if cfg.trace else None

    for i in range(n_iter):
        c = cfg.cp * (n_iter - i) / n_iter if sa else cfg.cp
        node = root
        path = [root]
        used: list[int] = []
        while not node.untried and node.children:
            node = uct_best_child(node, c)
            path.append(node)
            used.append(node.variable)
        if node.untried:
            v = node.untried.pop(int(rng.integers(len(node.untried))))
            used.append(v)
            taken = set(used)
            child = SearchNode(v, [u for u in range(nvars) if u not in taken])
            node.children.append(child)
            path.append(child)
        taken = set(used)
        rest = [u for u in range(nvars) if u not in taken]
        order = used + [rest[k] for k in rng.permutation(len(rest))]

        ops, delta = ev.evaluate(order, cfg.direction)
        for n in path:
            n.visits += 1
            n.score_sum += delta
            n.scores += 1
        if best_ops is None or ops.total < best_ops.total:
            best_order, best_ops, best_delta = order, ops, delta
        if trace is not None:
            trace.append((i, delta))

    return SearchResult(
        HornerScheme(tuple(best_order), cfg.direction), best_ops, ev.calls - calls0,
        best_delta, trace, root,
    )
