"""Strategy dispatch, C_p sensitivity sweeps and good-region analysis.

A sweep runs ``dots`` independent searches per grid point.  Each dot takes
the best of ``R`` MCTS runs of ``N`` iterations.  The seed of dot ``k`` at
grid point ``g`` is ``derive_seed(base_seed, g, k)`` and repetition ``r``
uses ``derive_seed(dot_seed, r)``, so every row is reproducible on its own
and the output does not depend on ``jobs``.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .expr import Polynomial
from .hornerform import Direction
from .search import (
    Criterion,
    NmcsConfig,
    SchemeEvaluator,
    SearchConfig,
    SearchResult,
    derive_seed,
    exhaustive_search,
    mcts_search,
    nmcs_search,
    occurrence_search,
)

__all__ = [
    "STRATEGIES",
    "run_strategy",
    "SweepSpec",
    "SweepRecord",
    "CSV_COLUMNS",
    "run_sweep",
    "records_to_csv",
    "read_csv",
    "RegionWidth",
    "good_region",
]

STRATEGIES = ("occurrence", "exhaustive", "mcts-uct", "mcts-sa-uct", "nmcs")
_CRITERION = {"mcts-uct": Criterion.UCT, "mcts-sa-uct": Criterion.SA_UCT}


def repetition_seed(seed: int, r: int, repetitions: int) -> int:
    """A single repetition runs on ``seed`` itself."""
    return seed if repetitions == 1 else derive_seed(seed, r)


def run_strategy(p: Polynomial, strategy: str, *, cp: float = 0.5, iterations: int = 1000,
                 repetitions: int = 1, direction: Direction = Direction.FORWARD,
                 seed: int = 0, level: int = 1,
                 evaluator: Optional[SchemeEvaluator] = None) -> SearchResult:
    """Run one named strategy; MCTS keeps the best of ``repetitions`` runs."""
    direction = Direction(direction)
    ev = evaluator if evaluator is not None else SchemeEvaluator(p)
    if strategy == "occurrence":
        return occurrence_search(p, direction, evaluator=ev)
    if strategy == "exhaustive":
        return exhaustive_search(p, direction, evaluator=ev)
    if strategy == "nmcs":
        return nmcs_search(p, NmcsConfig(level, seed, direction), evaluator=ev)
    if strategy not in _CRITERION:
        raise ValueError(f"unknown strategy {strategy!r}")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    best = None
    total_evals = 0
    for r in range(repetitions):
        cfg = SearchConfig(_CRITERION[strategy], cp, iterations, direction,
                           repetition_seed(seed, r, repetitions))
        res = mcts_search(p, cfg, evaluator=ev)
        total_evals += res.evaluations
        if best is None or res.best_ops.total < best.best_ops.total:
            best = res
    best.evaluations = total_evals
    best.root = None
    return best


@dataclass(frozen=True)
class SweepSpec:
    cp_min: float = 0.01
    cp_max: float = 10.0
    points: int = 25
    iterations: int = 1000
    repetitions: int = 1
    dots: int = 40
    strategy: str = "mcts-uct"
    directions: tuple[Direction, ...] = (Direction.FORWARD,)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(Direction(d) for d in self.directions))
        if not 0 < self.cp_min <= self.cp_max:
            raise ValueError("need 0 < cp_min <= cp_max")
        if self.points < 1 or self.dots < 1 or self.repetitions < 1 or self.iterations < 1:
            raise ValueError("points, dots, repetitions and iterations must be >= 1")
        if self.strategy not in _CRITERION:
            raise ValueError(f"sweeps run MCTS strategies only, not {self.strategy!r}")
        if self.points == 1 and self.cp_min != self.cp_max:
            raise ValueError("a single grid point needs cp_min == cp_max")

    def grid(self) -> list[float]:
        if self.points == 1:
            return [float(self.cp_min)]
        return [float(c) for c in np.geomspace(self.cp_min, self.cp_max, self.points)]

    @property
    def budget(self) -> int:
        """Iterations spent per dot (R x N)."""
        return self.repetitions * self.iterations


CSV_COLUMNS = ("strategy", "C_p", "N", "R", "direction", "seed", "ops_total",
               "ops_muls", "ops_adds", "best_scheme", "wall_seconds")


@dataclass(frozen=True)
class SweepRecord:
    strategy: str
    C_p: float
    N: int
    R: int
    direction: str
    seed: int
    ops_total: int
    ops_muls: int
    ops_adds: int
    best_scheme: str
    wall_seconds: Optional[float] = None
    dot: int = 0

    def row(self) -> list[str]:
        wall = "" if self.wall_seconds is None else f"{self.wall_seconds:.6f}"
        return [self.strategy, f"{self.C_p:.10g}", str(self.N), str(self.R), self.direction,
                str(self.seed), str(self.ops_total), str(self.ops_muls), str(self.ops_adds),
                self.best_scheme, wall]


# per-process state for sweep workers
_WORKER: dict = {}


def _init_worker(p: Polynomial) -> None:
    _WORKER["poly"] = p
    _WORKER["ev"] = SchemeEvaluator(p)


def _run_dot(task) -> SweepRecord:
    spec, g, cp, direction, dot, timing = task
    p, ev = _WORKER["poly"], _WORKER["ev"]
    seed = derive_seed(spec.seed, g, dot)
    t0 = time.perf_counter()
    res = run_strategy(p, spec.strategy, cp=cp, iterations=spec.iterations,
                       repetitions=spec.repetitions, direction=direction,
                       seed=seed, evaluator=ev)
    wall = time.perf_counter() - t0 if timing else None
    return SweepRecord(spec.strategy, cp, spec.iterations, spec.repetitions,
                       direction.value, seed, res.best_ops.total, res.best_ops.muls,
                       res.best_ops.adds, " ".join(res.best_scheme.names(p)), wall, dot)


def run_sweep(p: Polynomial, spec: SweepSpec, jobs: int = 1,
              timing: bool = False) -> list[SweepRecord]:
    """All dots of the sweep, sorted by (C_p, direction, dot)."""
    tasks = [(spec, g, cp, d, k, timing)
             for g, cp in enumerate(spec.grid())
             for d in spec.directions
             for k in range(spec.dots)]
    if jobs <= 1:
        _init_worker(p)
        records = [_run_dot(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (jobs * 8))
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(p,)) as pool:
            records = list(pool.map(_run_dot, tasks, chunksize=chunk))
    records.sort(key=lambda r: (r.C_p, r.direction, r.dot))
    return records


def records_to_csv(records: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in CSV_COLUMNS if c not in (reader.fieldnames or ())]
    if missing:
        raise ValueError(f"missing columns: {', '.join(missing)}")
    rows = list(reader)
    for r in rows:
        r["C_p"] = float(r["C_p"])
        for k in ("N", "R", "seed", "ops_total", "ops_muls", "ops_adds"):
            r[k] = int(r[k])
    return rows


@dataclass(frozen=True)
class RegionWidth:
    strategy: str
    direction: str
    lo: float
    hi: float
    points: int
    threshold: float

    @property
    def width(self) -> float:
        return self.hi - self.lo if self.points else 0.0


def _cells(grid: Sequence[float]) -> list[tuple[float, float]]:
    # each grid point owns the interval between geometric midpoints; the end
    # cells extend half a grid step beyond the first and last points
    if len(grid) == 1:
        return [(grid[0], grid[0])]
    mids = [math.sqrt(a * b) for a, b in zip(grid, grid[1:])]
    first = grid[0] * grid[0] / mids[0]
    last = grid[-1] * grid[-1] / mids[-1]
    bounds = [first, *mids, last]
    return list(zip(bounds, bounds[1:]))


def good_region(rows: Sequence[dict], tolerance: float = 0.02,
                best: Optional[int] = None) -> list[RegionWidth]:
    """Widest C_p run whose median dot is within ``tolerance`` of the best.

    ``rows`` are CSV rows (see :func:`read_csv`).  ``best`` defaults to the
    lowest ``ops_total`` among all rows, so passing the rows of several
    sweeps measures them against one common best.  One result per
    (strategy, direction) pair, in sorted order.
    """
    if not rows:
        return []
    if best is None:
        best = min(r["ops_total"] for r in rows)
    threshold = best * (1 + tolerance)
    groups: dict[tuple[str, str], dict[float, list[int]]] = {}
    for r in rows:
        groups.setdefault((r["strategy"], r["direction"]), {}).setdefault(
            r["C_p"], []).append(r["ops_total"])
    out = []
    for (strategy, direction), by_cp in sorted(groups.items()):
        grid = sorted(by_cp)
        cells = _cells(grid)
        good = [statistics.median(by_cp[c]) <= threshold for c in grid]
        runs = []  # (lo, hi, points) of each maximal run of good points
        k = 0
        while k < len(grid):
            if good[k]:
                j = k
                while j + 1 < len(grid) and good[j + 1]:
                    j += 1
                runs.append((cells[k][0], cells[j][1], j - k + 1))
                k = j + 1
            else:
                k += 1
        if runs:
            # widest run; the lowest C_p wins a tie
            lo, hi, npts = max(runs, key=lambda t: (t[1] - t[0], -t[0]))
        else:
            lo, hi, npts = float("nan"), float("nan"), 0
        out.append(RegionWidth(strategy, direction, lo, hi, npts, threshold))
    return out


def record_dict(r: SweepRecord) -> dict:
    d = asdict(r)
    d.pop("dot")
    return d
