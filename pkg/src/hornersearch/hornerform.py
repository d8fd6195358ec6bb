"""Horner schemes and the nested expression trees they produce.

Signs never become multiplications by -1.  Every subtree is built as a
``(sign, magnitude)`` pair; the sign travels up through products and is
absorbed by the enclosing sum, where it turns an addition into a
subtraction.  Only the root can carry a leftover :class:`Neg`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

from .expr import Polynomial, Term

__all__ = [
    "Direction",
    "HornerScheme",
    "Sum",
    "Product",
    "Power",
    "Var",
    "Const",
    "Neg",
    "HornerExpr",
    "effective_order",
    "apply_scheme",
    "tree_mul_count",
    "evaluate_tree",
    "format_tree",
]


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class HornerScheme:
    order: tuple[int, ...]
    direction: Direction = Direction.FORWARD

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        object.__setattr__(self, "direction", Direction(self.direction))
        if len(set(self.order)) != len(self.order):
            raise ValueError(f"duplicate variable in scheme {self.order}")

    def names(self, p: Polynomial) -> list[str]:
        return [p.names[v] for v in self.order]


@dataclass(frozen=True)
class Var:
    id: int


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Power:
    base: "HornerExpr"
    exponent: int


@dataclass(frozen=True)
class Product:
    children: tuple["HornerExpr", ...]


@dataclass(frozen=True)
class Sum:
    # a child wrapped in Neg is subtracted
    children: tuple["HornerExpr", ...]


@dataclass(frozen=True)
class Neg:
    child: "HornerExpr"


HornerExpr = Union[Sum, Product, Power, Var, Const, Neg]

_ONE = Const(1)


def effective_order(scheme: HornerScheme) -> tuple[int, ...]:
    """Extraction order: as given when forward, reversed when backward."""
    if scheme.direction is Direction.BACKWARD:
        return scheme.order[::-1]
    return scheme.order


def _power(v: int, e: int) -> HornerExpr:
    return Var(v) if e == 1 else Power(Var(v), e)


def _times_power(v: int, e: int, inner: HornerExpr) -> HornerExpr:
    pw = _power(v, e)
    return pw if inner == _ONE else Product((pw, inner))


def _signed_sum(parts: Sequence[tuple[int, HornerExpr]]) -> tuple[int, HornerExpr]:
    # factor out -1 only when every part is negative
    if all(s < 0 for s, _ in parts):
        return -1, Sum(tuple(e for _, e in parts))
    return 1, Sum(tuple(e if s > 0 else Neg(e) for s, e in parts))


def _monomial(term: Term, extracted: frozenset) -> tuple[int, HornerExpr]:
    factors: list[HornerExpr] = []
    c = abs(term.coefficient)
    if c != 1:
        factors.append(Const(c))
    for v, e in enumerate(term.exponents):
        if e and v not in extracted:
            factors.append(_power(v, e))
    sign = -1 if term.coefficient < 0 else 1
    if not factors:
        return sign, _ONE
    if len(factors) == 1:
        return sign, factors[0]
    return sign, Product(tuple(factors))


def _build(terms: list[Term], order: tuple[int, ...], depth: int) -> tuple[int, HornerExpr]:
    while depth < len(order) and all(t.exponents[order[depth]] == 0 for t in terms):
        depth += 1
    if depth == len(order):
        extracted = frozenset(order)
        parts = [_monomial(t, extracted) for t in terms]
        return parts[0] if len(parts) == 1 else _signed_sum(parts)

    v = order[depth]
    groups: dict[int, list[Term]] = {}
    for t in terms:
        groups.setdefault(t.exponents[v], []).append(t)
    exps = sorted(groups)

    sign, acc = _build(groups[exps[-1]], order, depth + 1)
    for j in range(len(exps) - 2, -1, -1):
        inner = _times_power(v, exps[j + 1] - exps[j], acc)
        sign, acc = _signed_sum([_build(groups[exps[j]], order, depth + 1), (sign, inner)])
    if exps[0] > 0:
        acc = _times_power(v, exps[0], acc)
    return sign, acc


def apply_scheme(p: Polynomial, scheme: HornerScheme) -> HornerExpr:
    """Nest ``p`` following the scheme's extraction order.

    With ``p = sum_j v^e_j * Q_j`` (``e_0 < e_1 < ...``) for the first
    variable ``v``, the result is
    ``v^e_0 * (Q_0 + v^(e_1-e_0) * (Q_1 + ...))`` with each ``Q_j`` nested by
    the remaining variables.  Variables outside the scheme stay in plain
    monomials.
    """
    for v in scheme.order:
        if not 0 <= v < p.nvars:
            raise ValueError(f"scheme references unknown variable id {v}")
    if not p.terms:
        return Const(0)
    sign, e = _build(list(p.terms), effective_order(scheme), 0)
    return Neg(e) if sign < 0 else e


def tree_mul_count(e: HornerExpr) -> int:
    """Multiplications of the tree with no sharing."""
    if isinstance(e, (Var, Const)):
        return 0
    if isinstance(e, Neg):
        return tree_mul_count(e.child)
    if isinstance(e, Power):
        return e.exponent - 1 + tree_mul_count(e.base)
    if isinstance(e, Product):
        return len(e.children) - 1 + sum(tree_mul_count(c) for c in e.children)
    return sum(tree_mul_count(c) for c in e.children)


def tree_add_count(e: HornerExpr) -> int:
    if isinstance(e, (Var, Const)):
        return 0
    if isinstance(e, Neg):
        return tree_add_count(e.child)
    if isinstance(e, Power):
        return tree_add_count(e.base)
    extra = len(e.children) - 1 if isinstance(e, Sum) else 0
    return extra + sum(tree_add_count(c) for c in e.children)


def evaluate_tree(e: HornerExpr, values: Sequence[int]) -> int:
    if isinstance(e, Var):
        return values[e.id]
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Neg):
        return -evaluate_tree(e.child, values)
    if isinstance(e, Power):
        return evaluate_tree(e.base, values) ** e.exponent
    if isinstance(e, Product):
        out = 1
        for c in e.children:
            out *= evaluate_tree(c, values)
        return out
    return sum(evaluate_tree(c, values) for c in e.children)


def format_tree(e: HornerExpr, names: Sequence[str]) -> str:
    """Human-readable infix form, e.g. ``x^2*(z + x*(y*(1 + z)))``."""

    def fmt(node: HornerExpr, in_product: bool) -> str:
        if isinstance(node, Var):
            return names[node.id]
        if isinstance(node, Const):
            return str(node.value)
        if isinstance(node, Neg):
            return f"-{fmt(node.child, True)}"
        if isinstance(node, Power):
            return f"{fmt(node.base, True)}^{node.exponent}"
        if isinstance(node, Product):
            return "*".join(
                f"({fmt(c, True)})" if isinstance(c, Product) else fmt(c, True)
                for c in node.children
            )
        out = ""
        for k, c in enumerate(node.children):
            if isinstance(c, Neg):
                out += f" - {fmt(c.child, True)}" if k else f"-{fmt(c.child, True)}"
            else:
                out += f" + {fmt(c, False)}" if k else fmt(c, False)
        return f"({out})" if in_product else out

    return fmt(e, False)
