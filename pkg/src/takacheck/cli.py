"""Command-line front end.

::

    takacheck check cylinder --catalog example34 --param n=2 --param a=1.224745 --seed 7
    takacheck check torus --file my_chart.imm --n 1 --k 1 --format text
    takacheck catalog list
    takacheck catalog show example34
    takacheck solve-b --n 3 --a 1.581139
    takacheck sweep example34 --param n=2 --values 1.05,1.2,1.35,sqrt(2)

Exit codes: 0 Satisfied, 1 Violated, 2 Degenerate, 3 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .catalog import CATALOG, OutOfRange, format_entry, format_listing, instantiate, solve_b
from .conditions import DEGENERATE, SATISFIED, TOL_CHECK, TOL_CONST, VIOLATED
from .expr import ExprError, parse, parse_constant
from .geometry import FrameSplit, NotAnImmersion
from .report import DEFAULT_COUNT, DEFAULT_MARGIN, SamplePlan, run_check, sha256_hex, write_report

log = logging.getLogger(__name__)

EXIT_CODES = {SATISFIED: 0, VIOLATED: 1, DEGENERATE: 2}
EXIT_USAGE = 3
OUT_OF_RANGE = "OutOfRange"
SWEEP_COLUMNS = ("param", "b", "residual_max", "c", "verdict")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _param_pairs(items: Sequence[str] | None) -> dict[str, float]:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"--param expects name=value, got {item!r}")
        out[name.strip()] = parse_constant(value)
    return out


def _load_input(args):
    """Returns (spec, default_frame, provenance)."""
    params = _param_pairs(args.param)
    if args.catalog:
        spec, frame, _ = instantiate(args.catalog, params)
        return spec, frame, {"source": "catalog", "id": args.catalog, "params": dict(spec.params)}
    path = Path(args.file)
    data = path.read_bytes()
    spec = parse(data.decode("utf-8"), overrides=params, name=path.name)
    return spec, None, {"source": "file", "path": str(args.file), "sha256": sha256_hex(data)}


def _resolve_frame(kind: str, spec, default: FrameSplit | None, args) -> FrameSplit | None:
    if kind == "sphere":
        return None
    flat = 1 if kind == "cylinder" else 2
    if args.n is None:
        if args.frame is not None or args.k is not None:
            raise UsageError("--frame and --k need --n")
        if default is not None and default.kind == kind:
            return default
        raise UsageError(f"{kind} check needs --n (and optionally --k) for this input")
    k = args.k if args.k is not None else spec.N - args.n - flat
    E = None
    if args.frame is not None:
        E = np.loadtxt(args.frame, dtype=float, ndmin=2)
    if args.n + k + flat != spec.N:
        raise UsageError(f"split n={args.n}, k={k} does not fit N={spec.N}")
    if kind == "cylinder":
        return FrameSplit.cylinder(args.n, k, E)
    return FrameSplit.torus(args.n, k, E)


def _plan(args) -> SamplePlan:
    return SamplePlan(
        seed=args.seed,
        count=args.samples,
        margin=args.margin,
        strategy="grid" if args.grid else "uniform_random",
    )


def cmd_check(args) -> int:
    spec, default_frame, provenance = _load_input(args)
    frame = _resolve_frame(args.kind, spec, default_frame, args)
    report = run_check(
        args.kind, spec, frame, _plan(args), args.tol, args.tol_const, provenance, workers=args.workers
    )
    data = write_report(report, args.format)
    if args.report:
        Path(args.report).write_bytes(data)
        sys.stdout.write(f"VERDICT: {report.result.verdict} (report written to {args.report})\n")
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_CODES[report.result.verdict]


def cmd_catalog(args) -> int:
    if args.action == "list":
        sys.stdout.write(format_listing())
        return 0
    if not args.id:
        raise UsageError("catalog show needs an entry id")
    if args.id not in CATALOG:
        raise UsageError(f"unknown catalog entry {args.id!r}")
    sys.stdout.write(format_entry(args.id, _param_pairs(args.param)))
    return 0


def cmd_solve_b(args) -> int:
    b = solve_b(args.n, args.a)
    sys.stdout.write(f"b = {b:.12g}\nb^2 = {b * b:.12g}\n")
    return 0


def sweep(
    family: str,
    values: Sequence[float],
    over: str | None = None,
    fixed: dict | None = None,
    kind: str | None = None,
    plan: SamplePlan | None = None,
    tol: float = TOL_CHECK,
    tol_const: float = TOL_CONST,
) -> list[dict]:
    """Run one check per parameter value; out-of-range values become marked rows."""
    entry = CATALOG[family]
    if over is None:
        if not entry.defaults:
            raise UsageError(f"{family} has no parameters to sweep")
        over = "a" if "a" in entry.defaults else next(iter(entry.defaults))
    if over not in entry.defaults:
        raise UsageError(f"{family} has no parameter {over!r}")
    rows = []
    for value in values:
        params = dict(fixed or {})
        params[over] = value
        try:
            spec, frame, expected = instantiate(family, params)
        except OutOfRange as exc:
            log.info("row %s=%r out of range: %s", over, value, exc)
            rows.append({"param": value, "b": None, "residual_max": None, "c": None, "verdict": OUT_OF_RANGE})
            continue
        check = kind or ("cylinder" if "cylinder" in expected else sorted(expected)[0])
        if check != "sphere" and (frame is None or frame.kind != check):
            raise UsageError(f"{family} has no default {check} frame")
        report = run_check(check, spec, frame, plan, tol, tol_const)
        result = report.result
        rows.append(
            {
                "param": value,
                "b": spec.params.get("b"),
                "residual_max": result.residual_max,
                "c": result.recovered.get("c"),
                "verdict": result.verdict,
            }
        )
    return rows


def format_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow(["" if row[c] is None else (repr(row[c]) if isinstance(row[c], float) else row[c])
                         for c in SWEEP_COLUMNS])
    return buf.getvalue()


def _sweep_values(args) -> list[float]:
    if args.values:
        return [parse_constant(v) for v in args.values.split(",") if v.strip()]
    lo, hi, count = args.range.split(":")
    return [float(v) for v in np.linspace(parse_constant(lo), parse_constant(hi), int(count))]


def cmd_sweep(args) -> int:
    if not (args.values or args.range):
        raise UsageError("sweep needs --values or --range")
    if args.family not in CATALOG:
        raise UsageError(f"unknown catalog entry {args.family!r}")
    rows = sweep(
        args.family,
        _sweep_values(args),
        over=args.over,
        fixed=_param_pairs(args.param),
        kind=args.check,
        plan=_plan(args),
        tol=args.tol,
        tol_const=args.tol_const,
    )
    text = format_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    checked = [r["verdict"] for r in rows if r["verdict"] != OUT_OF_RANGE]
    return max((EXIT_CODES[v] for v in checked), default=0)


def _add_sampling(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("sampling and tolerances")
    g.add_argument("--samples", type=int, default=DEFAULT_COUNT)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--margin", type=float, default=DEFAULT_MARGIN)
    g.add_argument("--grid", action="store_true", help="regular grid instead of random points")
    g.add_argument("--tol", type=float, default=TOL_CHECK, help="residual tolerance")
    g.add_argument("--tol-const", type=float, default=TOL_CONST, help="constant-spread tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="takacheck", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="check one spectral condition")
    p.add_argument("kind", choices=("sphere", "cylinder", "torus"))
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--catalog", metavar="ID")
    src.add_argument("--file", metavar="PATH")
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--n", type=int, help="sphere-factor dimension of the split")
    p.add_argument("--k", type=int, help="flat / second factor dimension")
    p.add_argument("--frame", metavar="FILE", help="N x N orthonormal frame, whitespace separated")
    _add_sampling(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--report", metavar="PATH")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("catalog", help="list or show built-in immersions")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("id", nargs="?")
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("solve-b", help="height slope for the S^{2n-1} x R family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=parse_constant, required=True)
    p.set_defaults(func=cmd_solve_b)

    p = sub.add_parser("sweep", help="check a catalog family over a parameter range (CSV)")
    p.add_argument("family")
    p.add_argument("--over", help="parameter to sweep (default: a, else the first parameter)")
    p.add_argument("--values", help="comma-separated values, constant expressions allowed")
    p.add_argument("--range", help="lo:hi:count, evenly spaced")
    p.add_argument("--param", action="append", metavar="NAME=VALUE", help="fixed parameters")
    p.add_argument("--check", choices=("sphere", "cylinder", "torus"))
    p.add_argument("--out", metavar="PATH")
    _add_sampling(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ExprError, OutOfRange, NotAnImmersion, OSError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        sys.stderr.write(f"takacheck: error: {msg}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
