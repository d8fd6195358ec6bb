"""Benchmark resolvents ``res(m, n) = res_x(sum a_i x^i, sum b_i x^i)``.

The resultant is the determinant of the Sylvester matrix, expanded by minors
along the rows with every minor memoized by its column subset.  Exponent
vectors are packed into one Python int (fixed-width bit fields) while the
expansion runs, so multiplying by a symbol is a single integer addition.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .expr import Polynomial, format_polynomial, from_dict, parse

__all__ = [
    "ResolventSpec",
    "sylvester_matrix",
    "symbolic_determinant",
    "gen_res",
    "res_filename",
    "load_or_generate",
    "DEFAULT_CAP",
]

DEFAULT_CAP = 13

Entry = Union[None, str, Polynomial]


@dataclass(frozen=True)
class ResolventSpec:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError(f"degrees must be >= 1, got ({self.m}, {self.n})")
        if self.m < self.n:
            m, n = self.n, self.m
            object.__setattr__(self, "m", m)
            object.__setattr__(self, "n", n)

    @property
    def nvars(self) -> int:
        return self.m + self.n + 2


def sylvester_matrix(spec: ResolventSpec) -> list[list[Optional[str]]]:
    """Symbolic Sylvester matrix; entries are symbol names or ``None`` for 0."""
    m, n = spec.m, spec.n
    size = m + n
    rows: list[list[Optional[str]]] = []
    for i in range(n):
        row: list[Optional[str]] = [None] * size
        for k in range(m + 1):
            row[i + k] = f"a{m - k}"
        rows.append(row)
    for i in range(m):
        row = [None] * size
        for k in range(n + 1):
            row[i + k] = f"b{n - k}"
        rows.append(row)
    return rows


def _entry_poly(entry: Entry) -> Optional[Polynomial]:
    if entry is None or entry == 0:
        return None
    if isinstance(entry, Polynomial):
        return entry if entry.terms else None
    return parse(str(entry))


def symbolic_determinant(matrix: Sequence[Sequence[Entry]]) -> Polynomial:
    """Exact determinant of a square matrix of polynomial entries."""
    size = len(matrix)
    if any(len(row) != size for row in matrix):
        raise ValueError("matrix must be square")
    if size == 0:
        return from_dict((), {(): 1})

    polys = [[_entry_poly(e) for e in row] for row in matrix]
    names: list[str] = []
    for row in polys:
        for p in row:
            if p is not None:
                for name in p.names:
                    if name not in names:
                        names.append(name)
    index = {name: i for i, name in enumerate(names)}

    # bit width per variable: no exponent can exceed the sum of row maxima
    bound = dict.fromkeys(names, 0)
    for row in polys:
        row_max: dict[str, int] = {}
        for p in row:
            if p is None:
                continue
            for t in p.terms:
                for name, e in zip(p.names, t.exponents):
                    row_max[name] = max(row_max.get(name, 0), e)
        for name, e in row_max.items():
            bound[name] += e
    width = max(bound.values(), default=1).bit_length() or 1

    def pack(p: Polynomial) -> list[tuple[int, int]]:
        out = []
        for t in p.terms:
            code = 0
            for name, e in zip(p.names, t.exponents):
                code += e << (width * index[name])
            out.append((code, t.coefficient))
        return out

    packed = [[pack(p) if p is not None else None for p in row] for row in polys]

    # minors[S] = det(rows 0..r-1, columns in bitmask S)
    minors: dict[int, dict[int, int]] = {0: {0: 1}}
    for r in range(size):
        row = packed[r]
        nxt: dict[int, dict[int, int]] = {}
        for mask, minor in minors.items():
            # new column j goes to position (#columns of mask below j)
            for j in range(size):
                bit = 1 << j
                if mask & bit or row[j] is None:
                    continue
                pos = bin(mask & (bit - 1)).count("1")
                sign = -1 if (r + pos) % 2 else 1
                target = nxt.setdefault(mask | bit, {})
                for code_e, c_e in row[j]:
                    ce = sign * c_e
                    for code, c in minor.items():
                        k = code + code_e
                        target[k] = target.get(k, 0) + ce * c
        minors = {}
        for mask, poly in nxt.items():
            poly = {k: c for k, c in poly.items() if c}
            if poly:
                minors[mask] = poly
    det = minors.get((1 << size) - 1, {})

    lim = (1 << width) - 1
    coeffs = {}
    for code, c in det.items():
        coeffs[tuple((code >> (width * v)) & lim for v in range(len(names)))] = c
    return from_dict(names, coeffs)


def gen_res(spec: ResolventSpec, cap: int = DEFAULT_CAP) -> Polynomial:
    if spec.m + spec.n > cap:
        raise ValueError(
            f"res({spec.m},{spec.n}) exceeds the size cap m+n <= {cap}; raise the cap explicitly"
        )
    return symbolic_determinant(sylvester_matrix(spec))


def res_filename(spec: ResolventSpec) -> str:
    return f"res_{spec.m}_{spec.n}.txt"


def load_or_generate(spec: ResolventSpec, cache_dir: Union[str, os.PathLike],
                     cap: int = DEFAULT_CAP) -> Polynomial:
    """Read ``res_<m>_<n>.txt`` from ``cache_dir``, generating it on a miss."""
    path = Path(cache_dir) / res_filename(spec)
    if path.exists():
        return parse(path.read_text())
    p = gen_res(spec, cap)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(format_polynomial(p) + "\n")
    tmp.replace(path)
    return p
