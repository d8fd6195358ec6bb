"""Result type and random streams shared by the search strategies.

Randomness comes from numpy's PCG64 seeded through ``SeedSequence``.  A run
owns one generator built from its 64-bit seed; independent runs (sweep dots,
repetitions) get seeds derived by hashing ``(base seed, *indices)`` with
``SeedSequence``, so results never depend on scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from ..expr import OpCount, Polynomial
from ..hornerform import HornerScheme
from .evaluate import SchemeEvaluator

__all__ = ["SearchResult", "make_rng", "derive_seed", "evaluator_for"]


@dataclass
class SearchResult:
    best_scheme: HornerScheme
    best_ops: OpCount
    evaluations: int
    delta: float = 1.0
    trace: Optional[list[tuple[int, float]]] = field(default=None, repr=False)
    # search tree of an MCTS run, kept for inspection; not part of equality
    root: Any = field(default=None, repr=False, compare=False)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def derive_seed(seed: int, *keys: int) -> int:
    """Child seed for stream ``keys`` of ``seed`` (stable 64-bit value)."""
    ss = np.random.SeedSequence([int(seed), *map(int, keys)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def evaluator_for(p: Polynomial, evaluator: Optional[SchemeEvaluator]) -> SchemeEvaluator:
    if evaluator is None:
        return SchemeEvaluator(p)
    if evaluator.poly is not p and evaluator.poly != p:
        raise ValueError("evaluator was built for a different polynomial")
    return evaluator
