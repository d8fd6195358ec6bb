"""Common subexpression elimination on Horner trees.

A tree is turned into a hash-consed binary DAG: every structurally equal
subexpression maps to one node.  Leaves are allocated first (variables by
id, then constants by value) so that node ids, and hence the canonical
operand order of commutative nodes, do not depend on traversal order.
Powers expand to left-deep chains ``x, x*x, (x*x)*x`` which lets ``x^2``
be reused as the prefix of ``x^3``.

Signs are normalized as well: ``x - y`` and ``y - x`` share one node.  Every
subexpression is built as a ``(negated, node)`` pair and a difference is
oriented by a structural hash of its operands, which never depends on node
numbering, so the sharing is the same however the DAG is traversed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .expr import OpCount
from .hornerform import Const, HornerExpr, Neg, Power, Product, Var

__all__ = [
    "DagNode",
    "ExprDag",
    "build_dag",
    "count_ops",
    "tree_op_count",
    "evaluate_dag",
    "emit_code",
    "dag_from_code",
]

ADD, SUB, MUL, VAR, CONST = "add", "sub", "mul", "var", "const"
_SYMBOL = {ADD: "+", SUB: "-", MUL: "*"}


MASK64 = (1 << 64) - 1
_HASH_CODE = {VAR: 1, CONST: 2, MUL: 3, ADD: 4, SUB: 5}


def _fmix(z: int) -> int:
    # splitmix64 finalizer
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix_hash(code: int, ha: int, hb: int) -> int:
    """Structural hash of a node from its kind code and operand hashes."""
    return _fmix(((_fmix((ha + code) & MASK64) * 3) & MASK64) ^ hb)


def leaf_hash(kind: str, value: int) -> int:
    if kind == VAR:
        return mix_hash(_HASH_CODE[VAR], value & MASK64, 0)
    h = mix_hash(_HASH_CODE[CONST], 1 if value < 0 else 0, 0)
    value = abs(value)
    while True:
        h = mix_hash(_HASH_CODE[CONST], h, value & MASK64)
        value >>= 64
        if not value:
            return h


def op_hash(kind: str, ha: int, hb: int) -> int:
    if kind != SUB and ha > hb:
        ha, hb = hb, ha
    return mix_hash(_HASH_CODE[kind], ha, hb)


class DagNode(NamedTuple):
    kind: str
    a: int  # operand id, variable id or constant value
    b: int = -1


@dataclass(frozen=True)
class ExprDag:
    nodes: tuple[DagNode, ...]
    root: int
    negate: bool = False  # the value is -root


class _Builder:
    def __init__(self, var_ids, consts):
        self.nodes: list[DagNode] = []
        self.hashes: list[int] = []
        self.table: dict[DagNode, int] = {}
        for v in sorted(var_ids):
            self.node(DagNode(VAR, v))
        for c in sorted(consts):
            self.node(DagNode(CONST, c))

    def node(self, n: DagNode) -> int:
        nid = self.table.get(n)
        if nid is None:
            nid = self.table[n] = len(self.nodes)
            self.nodes.append(n)
            if n.kind in _SYMBOL:
                h = op_hash(n.kind, self.hashes[n.a], self.hashes[n.b])
            else:
                h = leaf_hash(n.kind, n.a)
            self.hashes.append(h)
        return nid

    def op(self, kind: str, a: int, b: int) -> int:
        if kind != SUB and a > b:
            a, b = b, a
        return self.node(DagNode(kind, a, b))

    def fold(self, kind: str, ids: list[int]) -> int:
        ids = sorted(ids)
        acc = ids[0]
        for i in ids[1:]:
            acc = self.op(kind, acc, i)
        return acc

    def difference(self, pos: int, neg: int) -> tuple[bool, int]:
        """``pos - neg`` as a sign-normalized ``(negated, node)`` pair."""
        if self.hashes[pos] <= self.hashes[neg]:
            return False, self.op(SUB, pos, neg)
        return True, self.op(SUB, neg, pos)

    def build(self, e: HornerExpr) -> tuple[bool, int]:
        if isinstance(e, Var):
            return False, self.table[DagNode(VAR, e.id)]
        if isinstance(e, Const):
            return False, self.table[DagNode(CONST, e.value)]
        if isinstance(e, Neg):
            s, nid = self.build(e.child)
            return not s, nid
        if isinstance(e, Power):
            s, base = self.build(e.base)
            acc = base
            for _ in range(e.exponent - 1):
                acc = self.op(MUL, acc, base)
            return s and e.exponent % 2 == 1, acc
        if isinstance(e, Product):
            sign = False
            ids = []
            for c in e.children:
                s, nid = self.build(c)
                sign ^= s
                ids.append(nid)
            return sign, self.fold(MUL, ids)
        pos, neg = [], []
        for c in e.children:
            s, nid = self.build(c)
            (neg if s else pos).append(nid)
        if not neg:
            return False, self.fold(ADD, pos)
        if not pos:
            return True, self.fold(ADD, neg)
        return self.difference(self.fold(ADD, pos), self.fold(ADD, neg))


def _leaves(e: HornerExpr, var_ids: set, consts: set) -> None:
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Var):
            var_ids.add(n.id)
        elif isinstance(n, Const):
            consts.add(n.value)
        elif isinstance(n, (Power,)):
            stack.append(n.base)
        elif isinstance(n, Neg):
            stack.append(n.child)
        else:
            stack.extend(n.children)


def build_dag(e: HornerExpr) -> ExprDag:
    var_ids: set[int] = set()
    consts: set[int] = set()
    _leaves(e, var_ids, consts)
    b = _Builder(var_ids, consts)
    negate, root = b.build(e)
    return ExprDag(tuple(b.nodes), root, negate)


def _reachable(dag: ExprDag) -> list[bool]:
    seen = [False] * len(dag.nodes)
    seen[dag.root] = True
    for i in range(dag.root, -1, -1):
        if seen[i]:
            n = dag.nodes[i]
            if n.kind in _SYMBOL:
                seen[n.a] = seen[n.b] = True
    return seen


def count_ops(dag: ExprDag) -> OpCount:
    """Multiplications and additions/subtractions reachable from the root."""
    muls = adds = 0
    for n, live in zip(dag.nodes, _reachable(dag)):
        if live:
            if n.kind == MUL:
                muls += 1
            elif n.kind in (ADD, SUB):
                adds += 1
    return OpCount(muls, adds)


def tree_op_count(e: HornerExpr) -> OpCount:
    """Operation count of the binarized tree without any sharing."""
    if isinstance(e, (Var, Const)):
        return OpCount()
    if isinstance(e, Neg):
        return tree_op_count(e.child)
    if isinstance(e, Power):
        return tree_op_count(e.base) + OpCount(e.exponent - 1, 0)
    inner = OpCount()
    for c in e.children:
        inner = inner + tree_op_count(c)
    k = len(e.children) - 1
    return inner + (OpCount(k, 0) if isinstance(e, Product) else OpCount(0, k))


def evaluate_dag(dag: ExprDag, values: Sequence[int]) -> int:
    vals: list[int] = []
    for n in dag.nodes:
        if n.kind == VAR:
            vals.append(values[n.a])
        elif n.kind == CONST:
            vals.append(n.a)
        elif n.kind == ADD:
            vals.append(vals[n.a] + vals[n.b])
        elif n.kind == SUB:
            vals.append(vals[n.a] - vals[n.b])
        else:
            vals.append(vals[n.a] * vals[n.b])
    out = vals[dag.root]
    return -out if dag.negate else out


def emit_code(dag: ExprDag, names: Sequence[str], target: str = "result") -> str:
    """Straight-line C-like code, one assignment per reachable operation.

    Temporaries are ``Z1, Z2, ...`` in topological order; the last line
    assigns the root to ``target``.
    """
    live = _reachable(dag)
    ref: dict[int, str] = {}
    lines = []
    for i, n in enumerate(dag.nodes):
        if n.kind == VAR:
            ref[i] = names[n.a]
        elif n.kind == CONST:
            ref[i] = str(n.a)
        elif live[i]:
            ref[i] = f"Z{len(lines) + 1}"
            lines.append(f"{ref[i]} = {ref[n.a]}{_SYMBOL[n.kind]}{ref[n.b]};")
    lines.append(f"{target} = {'-' if dag.negate else ''}{ref[dag.root]};")
    return "\n".join(lines)


_STMT = re.compile(r"^\s*(\w+)\s*=\s*(-?)\s*(\w+)\s*(?:([-+*])\s*(\w+))?\s*;\s*$")


def dag_from_code(code: str, names: Sequence[str]) -> ExprDag:
    """Rebuild a DAG from :func:`emit_code` output (inverse up to dead nodes)."""
    index = {n: i for i, n in enumerate(names)}
    stmts = []
    for line in code.strip().splitlines():
        m = _STMT.match(line)
        if m is None:
            raise ValueError(f"cannot parse statement {line!r}")
        stmts.append(m.groups())

    def is_leaf_const(tok):
        return tok.isdigit()

    var_ids, consts = set(), set()
    for _, _, a, _, b in stmts:
        for tok in (a, b):
            if tok is None:
                continue
            if is_leaf_const(tok):
                consts.add(int(tok))
            elif tok in index:
                var_ids.add(index[tok])
    bld = _Builder(var_ids, consts)
    env: dict[str, int] = {}

    def operand(tok):
        if is_leaf_const(tok):
            return bld.table[DagNode(CONST, int(tok))]
        if tok in env:
            return env[tok]
        return bld.table[DagNode(VAR, index[tok])]

    kinds = {"+": ADD, "-": SUB, "*": MUL}
    *body, last = stmts
    for lhs, _, a, sym, b in body:
        env[lhs] = bld.op(kinds[sym], operand(a), operand(b))
    _, minus, a, _, _ = last
    return ExprDag(tuple(bld.nodes), operand(a), minus == "-")
