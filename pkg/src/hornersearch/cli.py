"""Command-line front end.

Exit status: 0 on success, 1 for usage errors (bad flags or parameter
values), 2 for input errors (unreadable or malformed files, inputs a
strategy cannot handle, unwritable outputs).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .csedag import build_dag, emit_code
from .expr import ParseError, Polynomial, expanded_op_count, format_polynomial, parse
from .hornerform import Direction, apply_scheme
from .resolvent import DEFAULT_CAP, ResolventSpec, gen_res, res_filename
from .search import score_delta
from .sweep import (
    STRATEGIES,
    SweepSpec,
    good_region,
    read_csv,
    record_dict,
    records_to_csv,
    run_strategy,
    run_sweep,
)

EXIT_OK, EXIT_USAGE, EXIT_INPUT = 0, 1, 2

COUNT_NOTE = (
    "expanded terms cost one multiplication per extra variable factor, plus one "
    "for a coefficient other than +-1; so x^2*z + x^3*y + x^3*y*z counts 9 "
    "multiplications, where a tally of 8 is also seen in the literature"
)


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _nonneg_float(text: str) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return v


def _pos_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _search_flags(ap: argparse.ArgumentParser, strategy_default: str = "occurrence") -> None:
    ap.add_argument("--strategy", choices=STRATEGIES, default=strategy_default)
    ap.add_argument("--cp", type=_nonneg_float, default=0.5,
                    help="exploration constant C_p (initial temperature for SA-UCT)")
    ap.add_argument("--iterations", "-N", type=_pos_int, default=1000)
    ap.add_argument("--repetitions", "-R", type=_pos_int, default=1)
    ap.add_argument("--direction", choices=[d.value for d in Direction], default="forward")
    ap.add_argument("--seed", type=_seed, default=0)
    ap.add_argument("--level", type=_pos_int, default=1, help="NMCS level")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hornersearch",
                 description="Find Horner schemes that minimize operation counts after CSE.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simplify", help="search a scheme and report operation counts")
    s.add_argument("input")
    _search_flags(s)
    s.add_argument("--format", choices=("text", "json", "csv"), default="text")
    s.add_argument("--output", "-o", help="write the report here instead of stdout")
    s.add_argument("--emit", metavar="PATH", help="also write straight-line code to PATH")

    e = sub.add_parser("emit", help="search a scheme and print straight-line code")
    e.add_argument("input")
    _search_flags(e)
    e.add_argument("--target", default="result")
    e.add_argument("--output", "-o")

    w = sub.add_parser("sweep", help="C_p sensitivity sweep, one CSV row per dot")
    w.add_argument("input")
    w.add_argument("--strategy", choices=("mcts-uct", "mcts-sa-uct"), default="mcts-uct")
    w.add_argument("--cp-min", type=float, default=0.01)
    w.add_argument("--cp-max", type=float, default=10.0)
    w.add_argument("--points", type=_pos_int, default=25)
    w.add_argument("--dots", type=_pos_int, default=40, help="runs per grid point")
    w.add_argument("--iterations", "-N", type=_pos_int, default=1000)
    w.add_argument("--repetitions", "-R", type=_pos_int, default=1)
    w.add_argument("--direction", choices=("forward", "backward", "both"), default="forward")
    w.add_argument("--seed", type=_seed, default=0)
    w.add_argument("--jobs", "-j", type=_pos_int, default=1)
    w.add_argument("--timing", action="store_true",
                   help="fill wall_seconds (makes the output non-reproducible)")
    w.add_argument("--format", choices=("csv", "json"), default="csv")
    w.add_argument("--output", "-o")

    r = sub.add_parser("region", help="good C_p interval of sweep CSVs")
    r.add_argument("csv", nargs="+")
    r.add_argument("--tolerance", type=_nonneg_float, default=0.02)
    r.add_argument("--format", choices=("text", "json", "csv"), default="text")
    r.add_argument("--output", "-o")

    g = sub.add_parser("gen-res", help="write the resolvent res(m, n)")
    g.add_argument("m", type=_pos_int)
    g.add_argument("n", type=_pos_int)
    g.add_argument("--cap", type=_pos_int, default=DEFAULT_CAP, help="largest m+n allowed")
    g.add_argument("--output", "-o", help="file path (default res_<m>_<n>.txt)")
    g.add_argument("--format", choices=("text", "json", "csv"), default="text")

    c = sub.add_parser("count", help="operation count of the expanded polynomial")
    c.add_argument("input")
    c.add_argument("--format", choices=("text", "json", "csv"), default="text")
    c.add_argument("--output", "-o")
    return ap


# --- helpers -------------------------------------------------------------------


def _read_poly(path: str) -> Polynomial:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return parse(text)
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def render(report: dict, fmt: str, notes: Sequence[str] = ()) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(report.keys())
        w.writerow([_fmt_value(v) for v in report.values()])
        return buf.getvalue()
    lines = [f"{k}={_fmt_value(v)}" for k, v in report.items()]
    lines += [f"# {n}" for n in notes]
    return "\n".join(lines) + "\n"


def _search(args, p: Polynomial):
    try:
        return run_strategy(p, args.strategy, cp=args.cp, iterations=args.iterations,
                            repetitions=args.repetitions, direction=args.direction,
                            seed=args.seed, level=args.level)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# --- commands ------------------------------------------------------------------


def cmd_simplify(args) -> int:
    p = _read_poly(args.input)
    res = _search(args, p)
    orig = expanded_op_count(p)
    report = {
        "input": args.input,
        "strategy": args.strategy,
        "direction": args.direction,
        "seed": args.seed,
    }
    if args.strategy.startswith("mcts"):
        report.update(cp=args.cp, iterations=args.iterations, repetitions=args.repetitions)
    elif args.strategy == "nmcs":
        report["level"] = args.level
    report.update(
        variables=p.nvars,
        terms=len(p.terms),
        original_muls=orig.muls,
        original_adds=orig.adds,
        original_total=orig.total,
        muls=res.best_ops.muls,
        adds=res.best_ops.adds,
        total=res.best_ops.total,
        delta=score_delta(orig.total, res.best_ops.total),
        scheme=" ".join(res.best_scheme.names(p)),
        evaluations=res.evaluations,
    )
    if args.emit:
        _write(_code(p, res) + "\n", args.emit)
        report["code"] = args.emit
    _write(render(report, args.format), args.output)
    return EXIT_OK


def _code(p: Polynomial, res, target: str = "result") -> str:
    return emit_code(build_dag(apply_scheme(p, res.best_scheme)), p.names, target)


def cmd_emit(args) -> int:
    p = _read_poly(args.input)
    res = _search(args, p)
    _write(_code(p, res, args.target) + "\n", args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    p = _read_poly(args.input)
    directions = ("forward", "backward") if args.direction == "both" else (args.direction,)
    try:
        spec = SweepSpec(args.cp_min, args.cp_max, args.points, args.iterations,
                         args.repetitions, args.dots, args.strategy, directions, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.output not in (None, "-"):
        # fail before the expensive part if the path is unusable
        _write("", args.output)
    records = run_sweep(p, spec, jobs=args.jobs, timing=args.timing)
    if args.format == "json":
        text = json.dumps([record_dict(r) for r in records], indent=2) + "\n"
    else:
        text = records_to_csv(records)
    _write(text, args.output)
    return EXIT_OK


def cmd_region(args) -> int:
    rows = []
    for path in args.csv:
        try:
            rows += read_csv(Path(path).read_text())
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
        except (KeyError, ValueError) as exc:
            raise InputError(f"{path}: not a sweep CSV ({exc})") from exc
    regions = good_region(rows, args.tolerance)
    out = []
    for reg in regions:
        out.append({
            "strategy": reg.strategy,
            "direction": reg.direction,
            "threshold": reg.threshold,
            "points": reg.points,
            "cp_lo": reg.lo,
            "cp_hi": reg.hi,
            "width": reg.width,
        })
    if args.format == "json":
        text = json.dumps(out, indent=2) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(out[0].keys() if out else ["strategy"])
        for o in out:
            w.writerow([_fmt_value(v) for v in o.values()])
        text = buf.getvalue()
    else:
        text = "\n".join(render(o, "text") for o in out)
    _write(text, args.output)
    return EXIT_OK


def cmd_gen_res(args) -> int:
    spec = ResolventSpec(args.m, args.n)
    try:
        p = gen_res(spec, args.cap)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    path = args.output or res_filename(spec)
    _write(format_polynomial(p) + "\n", path)
    orig = expanded_op_count(p)
    report = {"output": path, "m": spec.m, "n": spec.n, "variables": p.nvars,
              "terms": len(p.terms), "original_total": orig.total}
    sys.stdout.write(render(report, args.format))
    return EXIT_OK


def cmd_count(args) -> int:
    p = _read_poly(args.input)
    orig = expanded_op_count(p)
    report = {"input": args.input, "variables": p.nvars, "terms": len(p.terms),
              "muls": orig.muls, "adds": orig.adds, "total": orig.total}
    _write(render(report, args.format, notes=[COUNT_NOTE]), args.output)
    return EXIT_OK


COMMANDS = {
    "simplify": cmd_simplify,
    "emit": cmd_emit,
    "sweep": cmd_sweep,
    "region": cmd_region,
    "gen-res": cmd_gen_res,
    "count": cmd_count,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return exc.code
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"hornersearch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"hornersearch: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
