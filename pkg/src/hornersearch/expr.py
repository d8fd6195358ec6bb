"""Sparse multivariate polynomials with arbitrary-precision integer coefficients.

A polynomial is a collected list of terms over a variable table.  Each term
stores its exponents densely, one entry per variable id, so exponent vectors
compare and hash as plain tuples.

Text format::

    expression := term (('+'|'-') term)*
    term       := factor ('*' factor)*
    factor     := integer | identifier ('^' positive-integer)?

An optional leading sign is allowed and whitespace is ignored.

Variable ids are assigned in natural-sort order of the names (``a2`` before
``a10``), and only variables that survive collection are kept.  This makes
``parse(format_polynomial(p)) == p`` hold structurally.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

__all__ = [
    "ParseError",
    "Variable",
    "Term",
    "Polynomial",
    "OpCount",
    "parse",
    "format_polynomial",
    "occurrence_order",
    "expanded_op_count",
    "evaluate",
    "from_dict",
    "add",
    "mul",
    "neg",
]


class ParseError(ValueError):
    """Syntax error in polynomial source text, with 1-based line/column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class Variable(NamedTuple):
    id: int
    name: str


class Term(NamedTuple):
    """One monomial: ``coefficient * prod(x_i ** exponents[i])``."""

    coefficient: int
    exponents: tuple[int, ...]

    def powers(self) -> dict[int, int]:
        """Sparse view: variable id -> positive exponent."""
        return {v: e for v, e in enumerate(self.exponents) if e}

    @property
    def degree(self) -> int:
        return sum(self.exponents)


@dataclass(frozen=True)
class OpCount:
    muls: int = 0
    adds: int = 0

    @property
    def total(self) -> int:
        return self.muls + self.adds

    def __add__(self, other: OpCount) -> OpCount:
        return OpCount(self.muls + other.muls, self.adds + other.adds)

    def __sub__(self, other: OpCount) -> OpCount:
        return OpCount(self.muls - other.muls, self.adds - other.adds)


def _term_key(exponents: tuple[int, ...]):
    # graded lex, highest total degree first, then lex descending by var id
    return (-sum(exponents), tuple(-e for e in exponents))


def _natural_key(name: str):
    return [int(tok) if tok.isdigit() else tok for tok in re.split(r"(\d+)", name)]


@dataclass(frozen=True)
class Polynomial:
    """Collected polynomial, terms in canonical (graded lex) order.

    Build instances with :func:`from_dict` or :func:`parse`; the constructor
    trusts its arguments.
    """

    names: tuple[str, ...]
    terms: tuple[Term, ...]

    @property
    def variables(self) -> tuple[Variable, ...]:
        return tuple(Variable(i, n) for i, n in enumerate(self.names))

    @property
    def nvars(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return len(self.terms)

    def var_id(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return {t.exponents: t.coefficient for t in self.terms}

    def __str__(self) -> str:
        return format_polynomial(self)


def from_dict(names: Sequence[str], coeffs: Mapping[tuple[int, ...], int]) -> Polynomial:
    """Build a canonical polynomial from ``{exponent tuple: coefficient}``.

    Zero coefficients are dropped, unused variables are removed from the
    table and the remaining ones are renumbered by natural name order.
    """
    names = tuple(names)
    if len(set(names)) != len(names):
        raise ValueError("duplicate variable names")
    live = {e: c for e, c in coeffs.items() if c}
    used = [i for i in range(len(names)) if any(e[i] for e in live)]
    used.sort(key=lambda i: _natural_key(names[i]))
    new_names = tuple(names[i] for i in used)
    terms = [Term(c, tuple(e[i] for i in used)) for e, c in live.items()]
    terms.sort(key=lambda t: _term_key(t.exponents))
    return Polynomial(new_names, tuple(terms))


# --- arithmetic helpers (used by the resolvent generator) -------------------


def _align(p: Polynomial, q: Polynomial):
    names = list(p.names)
    for n in q.names:
        if n not in names:
            names.append(n)
    idx_q = [names.index(n) for n in q.names]
    width = len(names)

    def lift_p(e):
        return e + (0,) * (width - len(e))

    def lift_q(e):
        out = [0] * width
        for i, x in zip(idx_q, e):
            out[i] = x
        return tuple(out)

    return names, {lift_p(t.exponents): t.coefficient for t in p.terms}, {
        lift_q(t.exponents): t.coefficient for t in q.terms
    }


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    names, a, b = _align(p, q)
    for e, c in b.items():
        a[e] = a.get(e, 0) + c
    return from_dict(names, a)


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    names, a, b = _align(p, q)
    out: dict[tuple[int, ...], int] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return from_dict(names, out)


def neg(p: Polynomial) -> Polynomial:
    return Polynomial(p.names, tuple(Term(-t.coefficient, t.exponents) for t in p.terms))


# --- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^])"
)


def _tokenize(text: str):
    pos = 0
    line, col = 1, 1
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            tokens.append((kind, value, line, col))
        nl = value.count("\n")
        if nl:
            line += nl
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str):
        _, value, line, col = self.peek()
        found = repr(value) if value else "end of input"
        raise ParseError(f"{message}, found {found}", line, col)

    def expression(self):
        terms = []
        sign = 1
        kind, value, *_ = self.peek()
        if kind == "op" and value in "+-":
            self.take()
            sign = -1 if value == "-" else 1
        terms.append(self.term(sign))
        while True:
            kind, value, *_ = self.peek()
            if kind == "op" and value in "+-":
                self.take()
                terms.append(self.term(-1 if value == "-" else 1))
            elif kind == "eof":
                return terms
            else:
                self.error("expected '+', '-' or end of input")

    def term(self, sign: int):
        coeff = sign
        powers: dict[str, int] = {}
        while True:
            kind, value, *_ = self.peek()
            if kind == "int":
                self.take()
                coeff *= int(value)
            elif kind == "ident":
                self.take()
                exp = 1
                k2, v2, *_ = self.peek()
                if k2 == "op" and v2 == "^":
                    self.take()
                    k3, v3, *_ = self.peek()
                    if k3 != "int":
                        self.error("expected positive integer exponent")
                    if int(v3) <= 0:
                        self.error("exponent must be positive")
                    self.take()
                    exp = int(v3)
                powers[value] = powers.get(value, 0) + exp
            else:
                self.error("expected integer or identifier")
            kind, value, *_ = self.peek()
            if kind == "op" and value == "*":
                self.take()
                continue
            return coeff, powers


def parse(text: str) -> Polynomial:
    """Parse polynomial source text into a collected, canonical polynomial."""
    raw = _Parser(text).expression()
    names = sorted({n for _, pw in raw for n in pw}, key=_natural_key)
    index = {n: i for i, n in enumerate(names)}
    coeffs: dict[tuple[int, ...], int] = {}
    for c, pw in raw:
        e = [0] * len(names)
        for n, k in pw.items():
            e[index[n]] = k
        key = tuple(e)
        coeffs[key] = coeffs.get(key, 0) + c
    return from_dict(names, coeffs)


def _format_term(names: Sequence[str], term: Term) -> tuple[bool, str]:
    factors = []
    c = abs(term.coefficient)
    if c != 1 or not any(term.exponents):
        factors.append(str(c))
    for name, e in zip(names, term.exponents):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}^{e}")
    return term.coefficient < 0, "*".join(factors)


def format_polynomial(p: Polynomial) -> str:
    """Canonical text for ``p``; ``parse`` reads it back unchanged."""
    if not p.terms:
        return "0"
    parts = []
    for k, term in enumerate(p.terms):
        negative, body = _format_term(p.names, term)
        if k == 0:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(parts)


# --- statistics --------------------------------------------------------------


def occurrence_order(p: Polynomial) -> list[int]:
    """Variable ids by descending number of terms that contain them.

    Presence counts, not exponent weight.  Ties go to the lower id.
    """
    if not p.terms:
        raise ValueError("occurrence order of the zero polynomial is undefined")
    counts = [0] * p.nvars
    for t in p.terms:
        for v, e in enumerate(t.exponents):
            if e:
                counts[v] += 1
    return sorted(range(p.nvars), key=lambda v: (-counts[v], v))


def expanded_op_count(p: Polynomial) -> OpCount:
    """Operation count of the fully expanded sum of monomials.

    A power ``x^k`` costs ``k - 1`` multiplications, a coefficient with
    ``|c| != 1`` one more, and the sign of a term is absorbed by the addition
    that combines it.
    """
    muls = 0
    for t in p.terms:
        factors = sum(t.exponents)
        if abs(t.coefficient) != 1:
            factors += 1
        muls += max(factors - 1, 0)
    return OpCount(muls, max(len(p.terms) - 1, 0))


def evaluate(p: Polynomial, point: Sequence[int] | Mapping[str, int]) -> int:
    """Exact value of ``p`` at an integer point (by id sequence or name map)."""
    if isinstance(point, Mapping):
        values = [point[n] for n in p.names]
    else:
        values = list(point)
    total = 0
    for t in p.terms:
        v = t.coefficient
        for x, e in zip(values, t.exponents):
            if e:
                v *= x**e
        total += v
    return total

