"""Scheme evaluation: Horner nesting followed by CSE, reduced to an op count.

:class:`SchemeEvaluator` is the hot path of every search.  It fuses
``apply_scheme`` and ``build_dag`` for complete schemes: no tree objects are
built and nodes are hash-consed into integer-keyed tables.  Complete schemes
only ever produce binary sums/products, so the node count does not depend on
node numbering and matches the reference path exactly
(``tests/test_evaluate.py`` cross-checks all three routes).

Two backends share these semantics: ``"numba"`` (compiled, default when
numba imports) and ``"python"``.
"""

from __future__ import annotations

from collections import OrderedDict
from typing import Sequence

import numpy as np

from ..csedag import ADD, CONST, MUL, SUB, VAR, build_dag, count_ops, leaf_hash, op_hash
from ..expr import OpCount, Polynomial, expanded_op_count
from ..hornerform import Direction, HornerScheme, apply_scheme

try:
    from . import _kernel
except ImportError:  # pragma: no cover
    _kernel = None

__all__ = ["SchemeEvaluator", "evaluate_scheme", "score_delta", "check_complete"]


def score_delta(original_total: int, simplified_total: int) -> float:
    """Improvement ratio original/simplified; 1.0 when both are zero."""
    if simplified_total == 0:
        if original_total == 0:
            return 1.0
        raise ValueError("simplified form has no operations but the original does")
    return original_total / simplified_total


def check_complete(p: Polynomial, order: Sequence[int]) -> None:
    if sorted(order) != list(range(p.nvars)):
        raise ValueError(
            f"scheme {list(order)} is not a complete permutation of {p.nvars} variables"
        )


def evaluate_scheme(p: Polynomial, scheme: HornerScheme) -> tuple[OpCount, float]:
    """Reference evaluation through the explicit tree and DAG."""
    check_complete(p, scheme.order)
    ops = count_ops(build_dag(apply_scheme(p, scheme)))
    return ops, score_delta(expanded_op_count(p).total, ops.total)


class SchemeEvaluator:
    """Fast, counted evaluation of complete schemes for one polynomial.

    ``calls`` counts every evaluation request.  Results are memoized per
    effective order in a bounded LRU; a hit still counts as a call.
    """

    def __init__(self, p: Polynomial, cache_size: int = 4096, backend: str = "auto"):
        self.poly = p
        self.nvars = p.nvars
        self.original = expanded_op_count(p)
        self.calls = 0
        self.cache_size = cache_size
        self._cache: OrderedDict[tuple[int, ...], OpCount] = OrderedDict()
        self._cols = [[t.exponents[v] for t in p.terms] for v in range(p.nvars)]
        self._neg = [t.coefficient < 0 for t in p.terms]
        consts = sorted({abs(t.coefficient) for t in p.terms})
        self._const_id = {c: p.nvars + k for k, c in enumerate(consts)}
        self._term_const = [self._const_id[abs(t.coefficient)] for t in p.terms]
        self._one = self._const_id.get(1, -1)
        self._leaf_hashes = [leaf_hash(VAR, v) for v in range(p.nvars)] + [
            leaf_hash(CONST, c) for c in consts
        ]
        if backend == "auto":
            backend = "numba" if _kernel is not None else "python"
        if backend == "numba":
            if _kernel is None:
                raise RuntimeError("numba backend requested but numba is not importable")
            maxexp = max((max(t.exponents, default=0) for t in p.terms), default=0)
            self._X = np.array([t.exponents for t in p.terms], dtype=np.int64).reshape(
                len(p.terms), p.nvars
            )
            self._negarr = np.array(self._neg, dtype=np.bool_)
            self._cidarr = np.array(self._term_const, dtype=np.int64)
            self._maxexp = maxexp
            # headroom for the nodes one leaf can create past the load check
            self._table = _kernel.make_node_table(
                4 * len(p.terms) + 4 * p.nvars * (maxexp + 1) + 64
            )
            self._hs = self._make_hashes()
            self._pw, self._pwgen = _kernel.make_power_tables(p.nvars, maxexp)
            self._stamp = 0
            self._count = self._count_numba
        elif backend == "python":
            self._count = self._count_py
        else:
            raise ValueError(f"unknown backend {backend!r}")
        self.backend = backend

    def delta(self, ops: OpCount) -> float:
        return score_delta(self.original.total, ops.total)

    def evaluate(self, order: Sequence[int], direction: Direction = Direction.FORWARD):
        """Count one scheme; returns ``(OpCount, delta)``."""
        order = tuple(order)
        if direction is Direction.BACKWARD or direction == "backward":
            order = order[::-1]
        self.calls += 1
        ops = self._cache.get(order)
        if ops is None:
            if len(order) != self.nvars or set(order) != set(range(self.nvars)):
                check_complete(self.poly, order)
            ops = self._count(order)
            self._cache[order] = ops
            if len(self._cache) > self.cache_size:
                self._cache.popitem(last=False)
        else:
            self._cache.move_to_end(order)
        return ops, self.delta(ops)

    def _count_numba(self, order: tuple[int, ...]) -> OpCount:
        if not self._neg:
            return OpCount()
        arr = np.array(order, dtype=np.int64)
        while True:
            self._stamp += 1
            muls, adds = _kernel.count_scheme(
                self._X, arr, self._negarr, self._cidarr, self._one, self._table,
                self._hs, self._stamp, self._pw, self._pwgen, self._maxexp,
            )
            if muls >= 0:
                return OpCount(int(muls), int(adds))
            self._table = _kernel.make_node_table(2 * len(self._table))
            self._hs = self._make_hashes()

    def _make_hashes(self):
        hs = np.zeros(len(self._table) + len(self._leaf_hashes), dtype=np.uint64)
        hs[: len(self._leaf_hashes)] = self._leaf_hashes
        return hs

    def _count_py(self, order: tuple[int, ...]) -> OpCount:
        if not self._neg:
            return OpCount()
        cols = self._cols
        neg = self._neg
        term_const = self._term_const
        one = self._one
        nvars = self.nvars
        mul_t: dict[int, int] = {}
        add_t: dict[int, int] = {}
        sub_t: dict[int, int] = {}
        powers: dict[tuple[int, int], int] = {}
        hashes = list(self._leaf_hashes)

        def node(table, kind, a, b):
            key = (a << 32) | b
            nid = table.get(key)
            if nid is None:
                nid = table[key] = len(hashes)
                hashes.append(op_hash(kind, hashes[a], hashes[b]))
            return nid

        def mul(a, b):
            return node(mul_t, MUL, a, b) if a < b else node(mul_t, MUL, b, a)

        def power(v, e):
            if e == 1:
                return v
            key = (v, e)
            nid = powers.get(key)
            if nid is None:
                nid = powers[key] = mul(power(v, e - 1), v)
            return nid

        def times_power(v, e, inner):
            pw = power(v, e)
            return pw if inner == one else mul(pw, inner)

        def signed_add(s1, a, s2, b):
            if s1 == s2:
                return s1, node(add_t, ADD, a, b) if a < b else node(add_t, ADD, b, a)
            pos, ng = (b, a) if s1 else (a, b)
            # orient the difference structurally so x - y and y - x coincide
            if hashes[pos] <= hashes[ng]:
                return False, node(sub_t, SUB, pos, ng)
            return True, node(sub_t, SUB, ng, pos)

        def build(idx, depth):
            # returns (negative, node id)
            if len(idx) == 1:
                i = idx[0]
                acc = term_const[i]
                for d in range(nvars - 1, depth - 1, -1):
                    v = order[d]
                    e = cols[v][i]
                    if e:
                        acc = times_power(v, e, acc)
                return neg[i], acc
            while True:
                v = order[depth]
                col = cols[v]
                groups: dict[int, list[int]] = {}
                for i in idx:
                    e = col[i]
                    g = groups.get(e)
                    if g is None:
                        groups[e] = [i]
                    else:
                        g.append(i)
                if len(groups) > 1 or 0 not in groups:
                    break
                depth += 1
            exps = sorted(groups)
            sgn, acc = build(groups[exps[-1]], depth + 1)
            for j in range(len(exps) - 2, -1, -1):
                inner = times_power(v, exps[j + 1] - exps[j], acc)
                s_j, n_j = build(groups[exps[j]], depth + 1)
                sgn, acc = signed_add(s_j, n_j, sgn, inner)
            if exps[0]:
                acc = times_power(v, exps[0], acc)
            return sgn, acc

        build(list(range(len(neg))), 0)
        return OpCount(len(mul_t), len(add_t) + len(sub_t))
