"""Command line front end.

Exit codes: 0 success, 1 validation failure, 2 invalid solution, 3 timeout.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import bench
from .io import (IdMismatch, MalformedLine, analyze, parse_instance, parse_race_csv,
                 parse_solution, score_tournament, write_instance, write_solution)
from .model import InvariantViolation, Semantics, ValidationError
from .planner import PlanConfig, hardness, plan

EXIT_OK, EXIT_INVALID_INPUT, EXIT_INVALID_SOLUTION, EXIT_TIMEOUT = 0, 1, 2, 3


def _semantics(text):
    try:
        return Semantics.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _config(args, start_address=0):
    start = args.start_address if args.start_address is not None else start_address
    return PlanConfig(max_iterations=args.iterations, frag_target=args.frag_target,
                      start_address=start, seed=args.seed, parallelism=args.parallelism)


def _add_plan_flags(p):
    p.add_argument("--iterations", type=int, default=100)
    p.add_argument("--frag-target", type=float, default=0,
                   help="stop once fragmentation (bytes) is at most this")
    p.add_argument("--start-address", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--parallelism", type=int, default=1)


def cmd_plan(args):
    jobs, _, start = parse_instance(args.instance, args.semantics)
    res = plan(jobs, _config(args, start))
    pl = res.placement
    write_solution(pl.offsets, pl.makespan, args.output or sys.stdout)
    print(f"L={res.max_load} M={pl.makespan} F={res.fragmentation} "
          f"iterations={res.iterations_used} bootstrap={res.bootstrap_makespan}", file=sys.stderr)
    return EXIT_OK


def cmd_analyze(args):
    jobs, _, start = parse_instance(args.instance, args.semantics)
    offsets, makespan = parse_solution(args.solution)
    if args.start_address is not None:
        start = args.start_address
    rep = analyze(jobs, offsets, makespan, start)
    for line in rep.lines():
        print(line)
    return EXIT_OK if rep.valid else EXIT_INVALID_SOLUTION


def cmd_convert(args):
    jobs, declared, start = parse_instance(args.instance, args.src)
    write_instance(jobs, args.output or sys.stdout, args.dst, start)
    return EXIT_OK


def cmd_bench(args):
    cfg = _config(args)
    if args.latency:
        rows = []
        for path in args.instances:
            jobs, _, _ = parse_instance(path)
            for run in range(args.repeats):
                micros, m = bench.core_latency(jobs, (args.seed or 0) + run)
                rows.append(bench.BenchRow(path, run, m, "", micros, 1))
    else:
        rows = bench.run_benchmark(args.instances, cfg, args.repeats, args.timeout)
    if args.csv_out:
        bench.write_rows(rows, args.csv_out)
    else:
        print(",".join(bench.COLUMNS))
        for r in rows:
            print(",".join(str(getattr(r, c)) for c in bench.COLUMNS))
    return EXIT_TIMEOUT if any(r.failed for r in rows) else EXIT_OK


def cmd_score(args):
    per, totals = score_tournament(parse_race_csv(args.results))
    allocators = list(totals)
    print("benchmark," + ",".join(allocators))
    for name, pts in per.items():
        print(name + "," + ",".join(str(pts.get(a, "")) for a in allocators))
    print("TOTAL," + ",".join(str(totals[a]) for a in allocators))
    return EXIT_OK


def cmd_hardness(args):
    jobs, _, _ = parse_instance(args.instance, args.semantics)
    print(hardness(jobs))
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="dsaplan", description="Static memory planner.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="instance -> solution file")
    p.add_argument("instance")
    p.add_argument("-o", "--output")
    p.add_argument("--semantics", type=_semantics, help="override the header tag")
    _add_plan_flags(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("analyze", help="check a solution against its instance")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--semantics", type=_semantics)
    p.add_argument("--start-address", type=int, default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("convert", help="re-encode lifetimes under other semantics")
    p.add_argument("instance")
    p.add_argument("--from", dest="src", type=_semantics, help="defaults to the header tag")
    p.add_argument("--to", dest="dst", type=_semantics, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("bench", help="timed repeated plan runs, CSV out")
    p.add_argument("instances", nargs="+")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--timeout", type=float, default=None, help="seconds per run")
    p.add_argument("--csv-out")
    p.add_argument("--latency", action="store_true",
                   help="time the prelude plus one uncapped box/unbox/squeeze pass")
    _add_plan_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("score", help="tournament points from benchmark,allocator,F rows")
    p.add_argument("results")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("hardness", help="fragmentation left by the bootstrap heuristic")
    p.add_argument("instance")
    p.add_argument("--semantics", type=_semantics)
    p.set_defaults(func=cmd_hardness)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ValidationError, MalformedLine, ValueError) as exc:
        if isinstance(exc, IdMismatch):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID_SOLUTION
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
