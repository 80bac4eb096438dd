"""Command-line entry point: ``rqaoa {brute,qaoa,rqaoa,verify,sweep}``.

Exit codes: 0 success, 1 a verification check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import sys

from . import experiments as ex
from .errors import RQAOAError
from .ising import BRUTE_FORCE_CAP, brute_force_max, complete_model, read_model
from .recursive import RqaoaConfig
from .simulator import OptimizerConfig


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _add_input(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", metavar="FILE", help="edge list ('i j [w]' lines) or .json model")
    src.add_argument("--complete", metavar="M", type=int, help="unit-weight complete graph K_M")


def _load(args):
    if args.graph is not None:
        return read_model(args.graph), None
    return complete_model(args.complete), args.complete


def _emit(args, header, rows) -> None:
    text = ex.csv_text(header, rows)
    if getattr(args, "out", None):
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _row_header(timing: bool):
    return ex.ROW_FIELDS + (("wall_time",) if timing else ())


def cmd_brute(args) -> int:
    model, _ = _load(args)
    x, value = brute_force_max(model, cap=args.cap, threads=args.threads)
    print(f"optimum {ex.fmt(value)}")
    print("assignment " + " ".join(f"{v}:{s:+d}" for v, s in x.items()))
    return 0


def cmd_qaoa(args) -> int:
    model, m = _load(args)
    opt = OptimizerConfig(grid=args.grid, multistart=args.multistart, seed=args.seed)
    row = ex.qaoa_experiment(model, args.level, opt, complete=m, threads=args.threads)
    _emit(args, _row_header(args.timing), [row.cells(args.timing)])
    return 0


def cmd_rqaoa(args) -> int:
    model, m = _load(args)
    config = RqaoaConfig(
        level=args.level,
        threshold=args.nc,
        correlation_source=args.correlations,
        tie_break="seeded_random" if args.tie_break == "random" else "lexicographic",
        seed=args.seed,
        optimizer=OptimizerConfig(grid=args.grid, multistart=args.multistart, seed=args.seed),
        threads=args.threads,
    )
    row, sol = ex.rqaoa_experiment(model, config, complete=m)
    if args.verbose:
        for t in sol.traces:
            print(t.describe(), file=sys.stderr)
    _emit(args, _row_header(args.timing), [row.cells(args.timing)])
    traces = ex.trace_rows(sol)
    if args.trace_out:
        with open(args.trace_out, "w", newline="") as fh:
            ex.write_csv(fh, ex.TRACE_FIELDS, traces)
    print("assignment " + " ".join(f"{v}:{s:+d}" for v, s in sol.assignment.items()))
    return 0


def cmd_verify(args) -> int:
    if args.n_min < 2 or args.n_max < args.n_min:
        raise RQAOAError(f"need 2 <= n-min <= n-max, got {args.n_min}..{args.n_max}")
    results = ex.run_checks(args.check, range(args.n_min, args.n_max + 1), threads=args.threads)
    _emit(args, ex.CHECK_FIELDS, [r.cells() for r in results])
    failed = [r for r in results if not r.passed]
    print(
        f"# {args.check}: {len(results) - len(failed)}/{len(results)} passed",
        file=sys.stderr,
    )
    return 1 if failed else 0


def cmd_sweep(args) -> int:
    if args.n_min < 2 or args.n_max < args.n_min:
        raise RQAOAError(f"need 2 <= n-min <= n-max, got {args.n_min}..{args.n_max}")
    rows = ex.sweep(range(args.n_min, args.n_max + 1), threshold=args.nc, threads=args.threads)
    _emit(args, ex.SWEEP_FIELDS, rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rqaoa", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_positive_int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("brute", parents=[common], help="exact MAX-CUT by enumeration")
    _add_input(p)
    p.add_argument("--cap", type=_positive_int, default=BRUTE_FORCE_CAP)
    p.set_defaults(func=cmd_brute)

    def optimizer_flags(p):
        p.add_argument("--level", type=_positive_int, default=1, help="QAOA level p >= 1")
        p.add_argument("--grid", type=int, default=64, help="level-1 grid points per axis")
        p.add_argument("--multistart", type=int, default=8)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", metavar="CSV")
        p.add_argument("--timing", action="store_true", help="append a wall_time column")

    p = sub.add_parser("qaoa", parents=[common], help="optimise level-p QAOA")
    _add_input(p)
    optimizer_flags(p)
    p.set_defaults(func=cmd_qaoa)

    p = sub.add_parser("rqaoa", parents=[common], help="run recursive QAOA")
    _add_input(p)
    optimizer_flags(p)
    p.add_argument("--nc", type=int, default=8, help="stop at this many coupled vertices")
    p.add_argument(
        "--correlations", choices=("statevector", "analytic", "auto"), default="auto"
    )
    p.add_argument("--tie-break", choices=("lexicographic", "random"), default="lexicographic")
    p.add_argument("--trace-out", metavar="CSV", help="write per-round trace")
    p.set_defaults(func=cmd_rqaoa)

    p = sub.add_parser("verify", parents=[common], help="verification checks on K_2n")
    p.add_argument("--check", choices=ex.CHECKS, required=True)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--out", metavar="CSV")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="QAOA_1 vs RQAOA_1 ratios over n")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--nc", type=int, default=8)
    p.add_argument("--out", metavar="CSV")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RQAOAError, OSError) as exc:
        print(f"rqaoa {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
