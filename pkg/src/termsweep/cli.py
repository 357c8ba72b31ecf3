"""Command-line front end: ``termsweep normalize|gen|bench|dump-dispatch``."""
from __future__ import annotations

import argparse
import sys

from . import bench as benchmod
from .compiler import compile_system, dump_dispatch
from .corpora import FAMILIES, GenSpec, generate
from .parser import TRSError, load_file
from .seq import StepBudgetExceeded
from .store import CapacityExceeded
from .terms import format_term

EXIT_OK, EXIT_INPUT, EXIT_RESOURCE, EXIT_DIVERGENCE = 0, 2, 3, 4


def _engine_flags(p: argparse.ArgumentParser):
    p.add_argument("--workers", default="1",
                   help="sweep worker threads (an integer or 'max')")
    p.add_argument("--chunk-size", type=int, default=1024, help="slots per sweep work item")
    p.add_argument("--capacity", type=int, default=None, help="initial store capacity in slots")
    p.add_argument("--fixed-capacity", action="store_true",
                   help="fail instead of growing the store")
    p.add_argument("--step-budget", type=int, default=10 ** 9,
                   help="abort after this many rewrites")
    p.add_argument("--no-subterm-cursor", action="store_true",
                   help="recheck every argument each sweep")


def _sweep_opts(args) -> dict:
    workers = args.workers
    return dict(workers="max" if workers == "max" else int(workers),
                chunk_size=args.chunk_size, capacity=args.capacity,
                fixed_capacity=args.fixed_capacity, step_budget=args.step_budget,
                use_cursor=not args.no_subterm_cursor)


def _load(path):
    try:
        return load_file(path)
    except TRSError as e:
        print(e.format(path), file=sys.stderr)
    except OSError as e:
        print(f"{path}: {e.strerror}", file=sys.stderr)
    return None


def cmd_normalize(args) -> int:
    system = _load(args.file)
    if system is None:
        return EXIT_INPUT
    table = compile_system(system)
    if args.dump_dispatch:
        sys.stderr.write(dump_dispatch(table))
    opts = _sweep_opts(args)
    if args.engine == "seq":
        opts = dict(step_budget=opts["step_budget"])
    nf, report, trace = benchmod.run_engine(args.engine, system, table, **opts)
    print(format_term(system.signature, nf))
    print(report.summary(), file=sys.stderr)
    if args.trace:
        if trace is None:
            print("--trace is only produced by the sweep engine", file=sys.stderr)
        else:
            trace.write_csv(args.trace)
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = GenSpec(args.family, tuple(args.params), args.seed)
    text = generate(spec)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    system = _load(args.file)
    if system is None:
        return EXIT_INPUT
    engines = tuple(e.strip() for e in args.engines.split(","))
    for e in engines:
        if e not in benchmod.ENGINES:
            print(f"unknown engine {e!r}", file=sys.stderr)
            return EXIT_INPUT
    opts = _sweep_opts(args)
    reports = benchmod.bench(system, engines, args.repetitions, **opts)
    for r in benchmod.median_reports(reports):
        print(r.summary())
    if args.csv:
        with open(args.csv, "w") as f:
            f.write(benchmod.reports_csv(reports))
    return EXIT_OK


def cmd_dump_dispatch(args) -> int:
    system = _load(args.file)
    if system is None:
        return EXIT_INPUT
    sys.stdout.write(dump_dispatch(compile_system(system)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="termsweep", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="rewrite a .trs file's input term to normal form")
    p.add_argument("file")
    p.add_argument("--engine", choices=benchmod.ENGINES, default="sweep")
    p.add_argument("--trace", metavar="PATH", help="write the per-sweep trace as CSV")
    p.add_argument("--dump-dispatch", action="store_true",
                   help="print the compiled match programs to stderr")
    _engine_flags(p)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("gen", help="generate a benchmark .trs file")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("params", type=int, nargs="+",
                   help="mergesort N | treemergesort DEPTH K | transform DEPTH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="measure rewritten terms per second")
    p.add_argument("file")
    p.add_argument("--engines", default="seq,sweep")
    p.add_argument("--repetitions", "-r", type=int, default=3)
    p.add_argument("--csv", metavar="PATH", help="write per-run results as CSV")
    _engine_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("dump-dispatch", help="print compiled match programs")
    p.add_argument("file")
    p.set_defaults(func=cmd_dump_dispatch)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (StepBudgetExceeded, CapacityExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except benchmod.EngineDivergence as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIVERGENCE


if __name__ == "__main__":
    sys.exit(main())
