"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 input or
validation error.  Diagnostics go to stderr; data goes to stdout or --out.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys

from . import bench
from .baseline import TooLarge, brute_force, build_network, solve_mincost
from .certificate import Verdict, build_certificate, verify
from .flowsolver import SolveTrace, solve
from .formats import (FormatError, instance_from_json, instance_to_json, read_json,
                      schedule_from_json, schedule_to_json, write_json)
from .greedy import greedy_solve, naive_greedy
from .model import ScheduleInstanceMismatch, SearchInstance, ValidationError, objective
from .scenario import GenerationFailed, SpatialField, compile_instance, generate_field

log = logging.getLogger("sparsesearch")

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load_instance(path: str) -> SearchInstance:
    try:
        return instance_from_json(read_json(path))
    except (OSError, json.JSONDecodeError, FormatError, ValidationError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _need_homogeneous(instance: SearchInstance, what: str) -> None:
    if not instance.homogeneous:
        raise InputError(f"{what} needs location-only detection probabilities; "
                         "this instance has per-arc alphas, use solve-greedy")


def cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    _need_homogeneous(inst, "solve")
    schedule, trace = solve(inst)
    write_json(schedule_to_json(schedule, inst), args.out)
    if args.emit_trace:
        write_json(trace.to_json(inst), args.emit_trace)
    if args.verify:
        verdict = verify(schedule, build_certificate(trace, inst), inst)
        if not verdict.passed:
            print(json.dumps(verdict.to_json(), indent=2), file=sys.stderr)
            return EXIT_VERIFY
        log.info("certificate verified")
    return EXIT_OK


def cmd_solve_greedy(args) -> int:
    inst = _load_instance(args.instance)
    schedule = greedy_solve(inst)
    write_json(schedule_to_json(schedule, inst), args.out)
    if args.oracle_check:
        got = objective(schedule, inst)
        ref = objective(naive_greedy(inst), inst)
        if got != ref:
            log.error("heap greedy %r differs from naive greedy %r", got, ref)
            return EXIT_VERIFY
        try:
            _, opt = brute_force(inst)
        except TooLarge:
            log.info("instance too large for the exhaustive check; naive greedy agrees")
        else:
            if got < 0.5 * opt - 1e-12:
                log.error("greedy %r below half the optimum %r", got, opt)
                return EXIT_VERIFY
            log.info("greedy %.12g, optimum %.12g", got, opt)
    return EXIT_OK


def cmd_baseline(args) -> int:
    inst = _load_instance(args.instance)
    if args.oracle:
        try:
            schedule, _ = brute_force(inst)
        except TooLarge as exc:
            raise InputError(str(exc)) from exc
    else:
        _need_homogeneous(inst, "baseline")
        schedule, _ = solve_mincost(build_network(inst))
    write_json(schedule_to_json(schedule, inst), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load_instance(args.instance)
    _need_homogeneous(inst, "verify")
    try:
        schedule = schedule_from_json(read_json(args.schedule), inst)
        trace = SolveTrace.from_json(read_json(args.trace), inst)
    except (OSError, json.JSONDecodeError, FormatError, KeyError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    try:
        verdict = verify(schedule, build_certificate(trace, inst), inst)
    except ValueError as exc:
        verdict = Verdict()
        verdict.add("certificate", detail=str(exc))
    print(json.dumps(verdict.to_json(), indent=2))
    return EXIT_OK if verdict.passed else EXIT_VERIFY


def cmd_gen(args) -> int:
    try:
        if args.field_in:
            field = SpatialField.from_json(read_json(args.field_in))
            if args.radius is not None:
                field = field.with_radius(args.radius)
            if not field.is_covered():
                raise InputError(f"radius {field.radius} leaves sensors or locations uncovered")
        else:
            if args.radius is None:
                raise InputError("--radius is required without --field-in")
            field = generate_field(args.sensors, args.locations, args.radius,
                                   args.width, args.height, args.seed)
    except (GenerationFailed, ValueError, OSError) as exc:
        raise InputError(str(exc)) from exc
    inst = compile_instance(field, args.budget, alpha_range=(args.alpha_min, args.alpha_max),
                            heterogeneous=args.hetero)
    write_json(instance_to_json(inst), args.out)
    if args.field_out:
        write_json(field.to_json(), args.field_out)
    log.info("%d sensors, %d locations, |A| = %d", inst.num_agents, inst.num_locations,
             len(inst.arcs))
    return EXIT_OK


def cmd_bench(args) -> int:
    config = bench.FieldConfig(args.sensors, args.locations, args.radius, args.width, args.height)
    if args.mode == "budget":
        rows = bench.run_budget_sweep(config, args.budgets, args.reps, args.seed,
                                      args.with_baseline, args.timeout_s, args.csv, args.inner)
    else:
        rows = bench.run_sparsity_sweep(config, args.radii, args.budget, args.reps, args.seed,
                                        args.with_baseline, args.timeout_s, args.csv, args.inner)
    if args.dat:
        bench.write_dat(rows, args.dat)
    if not args.csv:
        w = csv.writer(sys.stdout)
        w.writerow(bench.CSV_FIELDS)
        for r in rows:
            w.writerow([r.sweep, r.param, r.abs_A, r.solver, r.rep, r.seconds, r.objective])
    base = {p: t for p, _, t in bench.medians(rows, bench.BASELINE)}
    for p, a, t in bench.medians(rows):
        extra = f"  baseline {base[p]:.4f}s" if p in base and math.isfinite(base[p]) else ""
        log.info("%s=%g |A|=%d specialized %.4fs%s", args.mode, p, a, t, extra)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparsesearch",
                                     description="Sparse multi-agent discrete search solvers")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="exact solve of a location-only-alpha instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--out")
    p.add_argument("--verify", action="store_true", help="build and check the optimality certificate")
    p.add_argument("--emit-trace", metavar="PATH")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("solve-greedy", help="greedy solve with per-arc alphas")
    p.add_argument("--instance", required=True)
    p.add_argument("--out")
    p.add_argument("--oracle-check", action="store_true")
    p.set_defaults(func=cmd_solve_greedy)

    p = sub.add_parser("baseline", help="generic min-cost flow (or --oracle brute force)")
    p.add_argument("--instance", required=True)
    p.add_argument("--out")
    p.add_argument("--oracle", action="store_true")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("verify", help="check a schedule against the prices from a trace")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--trace", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="random spatial-field instance")
    p.add_argument("--sensors", type=int, default=100)
    p.add_argument("--locations", type=int, default=1000)
    p.add_argument("--radius", type=float)
    p.add_argument("--budget", type=int, default=50)
    p.add_argument("--width", type=float, default=100.0)
    p.add_argument("--height", type=float, default=100.0)
    p.add_argument("--alpha-min", type=float, default=0.1)
    p.add_argument("--alpha-max", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hetero", action="store_true", help="per-arc detection probabilities")
    p.add_argument("--out")
    p.add_argument("--field-out", metavar="PATH")
    p.add_argument("--field-in", metavar="PATH", help="reuse stored positions (radius sweeps)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="runtime sweeps")
    p.add_argument("--mode", choices=["budget", "sparsity"], required=True)
    p.add_argument("--sensors", type=int, default=50)
    p.add_argument("--locations", type=int, default=300)
    p.add_argument("--radius", type=float, default=15.0)
    p.add_argument("--width", type=float, default=100.0)
    p.add_argument("--height", type=float, default=100.0)
    p.add_argument("--budgets", type=int, nargs="+", default=list(range(10, 100, 10)))
    p.add_argument("--radii", type=float, nargs="+",
                   default=[15.0, 17.5, 20.0, 22.5, 25.0, 27.5, 30.0])
    p.add_argument("--budget", type=int, default=50, help="per-sensor budget for --mode sparsity")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--inner", type=int, default=5,
                   help="specialized calls per sample; the fastest is recorded")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--csv")
    p.add_argument("--dat", help="also write medians as a gnuplot data file")
    p.add_argument("--with-baseline", action="store_true")
    p.add_argument("--timeout-s", type=float, default=300.0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (InputError, ScheduleInstanceMismatch, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
