"""Runtime sweeps comparing the specialized solver with the generic min-cost flow."""

from __future__ import annotations

import csv
import gc
import math
import statistics
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .baseline import BaselineTimeout, build_network, solve_mincost
from .flowsolver import solve
from .model import SearchInstance, objective
from .scenario import SpatialField, compile_instance, generate_field

CSV_FIELDS = ["sweep", "param", "abs_A", "solver", "rep", "seconds", "objective"]
AUDIT_C = 4
AGREE_RTOL = 1e-9

SPECIALIZED = "specialized"
BASELINE = "baseline"


@dataclass
class FieldConfig:
    sensors: int = 50
    locations: int = 300
    radius: float = 15.0
    width: float = 100.0
    height: float = 100.0

    def generate(self, seed: int) -> SpatialField:
        return generate_field(self.sensors, self.locations, self.radius,
                              self.width, self.height, seed)


FULL_SCALE = FieldConfig(sensors=100, locations=1000)


@dataclass
class Row:
    sweep: str
    param: float
    abs_A: int
    solver: str
    rep: int
    seconds: float
    objective: float


class ObjectiveMismatch(AssertionError):
    pass


class _CsvSink:
    def __init__(self, path: str | Path | None):
        self._fh = open(path, "w", newline="") if path else None
        self._writer = csv.DictWriter(self._fh, CSV_FIELDS) if self._fh else None
        if self._writer:
            self._writer.writeheader()

    def write(self, row: Row) -> None:
        if self._writer:
            self._writer.writerow(asdict(row))
            self._fh.flush()

    def close(self) -> None:
        if self._fh:
            self._fh.close()


def _timed(fn: Callable[[], float], inner: int = 1) -> tuple[float, float]:
    """Fastest of ``inner`` back-to-back calls, with the collector paused."""
    gc_was_on = gc.isenabled()
    gc.disable()
    try:
        best = math.inf
        for _ in range(inner):
            t0 = time.perf_counter()
            value = fn()
            best = min(best, time.perf_counter() - t0)
        return best, value
    finally:
        if gc_was_on:
            gc.enable()


def _specialized(instance: SearchInstance) -> float:
    schedule, _ = solve(instance)
    return objective(schedule, instance)


def _run_sweep(sweep: str, points: list[tuple[float, SearchInstance]], reps: int,
               with_baseline: bool, timeout_s: float | None,
               csv_path: str | Path | None, inner: int = 1) -> list[Row]:
    # reps are interleaved across points so slow drifts of machine speed hit
    # every point alike instead of skewing whichever point ran during them.
    # Each specialized sample is the best of ``inner`` calls.  Baseline solves
    # run for seconds and disturb whatever is timed right after them, so they
    # get their own pass, timed once per rep.
    rows: list[Row] = []
    ref: dict[float, float] = {}
    sink = _CsvSink(csv_path)
    try:
        for rep in range(reps):
            for param, instance in points:
                secs, val = _timed(lambda: _specialized(instance), inner)
                ref.setdefault(param, val)
                rows.append(Row(sweep, param, len(instance.arcs), SPECIALIZED, rep, secs, val))
                sink.write(rows[-1])
        for rep in range(reps if with_baseline else 0):
            for param, instance in points:
                # network construction is part of the generic method's cost
                try:
                    secs, val = _timed(
                        lambda: solve_mincost(build_network(instance), timeout_s)[1])
                except BaselineTimeout:
                    secs, val = math.inf, math.nan
                rows.append(Row(sweep, param, len(instance.arcs), BASELINE, rep, secs, val))
                sink.write(rows[-1])
                if not math.isnan(val) and not math.isclose(val, ref[param], rel_tol=AGREE_RTOL):
                    raise ObjectiveMismatch(
                        f"{sweep} {param}: specialized {ref[param]!r} vs baseline {val!r}")
    finally:
        sink.close()
    return rows


def run_budget_sweep(config: FieldConfig, budgets: Iterable[int], reps: int = 5, seed: int = 0,
                     with_baseline: bool = True, timeout_s: float | None = 300.0,
                     csv_path: str | Path | None = None, inner: int = 5) -> list[Row]:
    """Time both solvers on one fixed field while the per-sensor budget varies."""
    if reps < 1 or inner < 1:
        raise ValueError("reps and inner must be >= 1")
    budgets = list(budgets)
    if any(b < 1 for b in budgets):
        raise ValueError(f"budgets must be positive: {budgets}")
    field_ = config.generate(seed)
    points = [(b, compile_instance(field_, b)) for b in budgets]
    return _run_sweep("budget", points, reps, with_baseline, timeout_s, csv_path, inner)


def run_sparsity_sweep(config: FieldConfig, radii: Iterable[float], budget: int = 50,
                       reps: int = 5, seed: int = 0, with_baseline: bool = True,
                       timeout_s: float | None = 300.0,
                       csv_path: str | Path | None = None, inner: int = 5) -> list[Row]:
    """Time both solvers on one fixed field while the sensing radius varies.

    The field is generated once at the smallest radius, which guarantees
    coverage for every larger one.
    """
    if reps < 1 or inner < 1:
        raise ValueError("reps and inner must be >= 1")
    radii = sorted(radii)
    base = FieldConfig(config.sensors, config.locations, radii[0], config.width, config.height)
    field_ = base.generate(seed)
    points = [(r, compile_instance(field_.with_radius(r), budget)) for r in radii]
    return _run_sweep("sparsity", points, reps, with_baseline, timeout_s, csv_path, inner)


def medians(rows: list[Row], solver: str = SPECIALIZED) -> list[tuple[float, int, float]]:
    """``(param, abs_A, median seconds)`` per sweep point, in sweep order."""
    groups: dict[float, list[Row]] = {}
    for r in rows:
        if r.solver == solver:
            groups.setdefault(r.param, []).append(r)
    return [(p, g[0].abs_A, statistics.median(x.seconds for x in g)) for p, g in groups.items()]


def r_squared(xs: list[float], ys: list[float]) -> float:
    """Coefficient of determination of the least-squares line through (xs, ys)."""
    slope, intercept = statistics.linear_regression(xs, ys)
    mean = statistics.fmean(ys)
    ss_tot = sum((y - mean) ** 2 for y in ys)
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    return 1.0 - ss_res / ss_tot if ss_tot else 1.0


def write_dat(rows: list[Row], path: str | Path) -> None:
    """Whitespace-separated medians for plotting: param |A| specialized baseline."""
    special = {p: (a, t) for p, a, t in medians(rows, SPECIALIZED)}
    base = {p: t for p, _, t in medians(rows, BASELINE)}
    with open(path, "w") as fh:
        fh.write("# param abs_A specialized_s baseline_s\n")
        for p, (a, t) in special.items():
            fh.write(f"{p:g} {a} {t:.6g} {base.get(p, math.nan):.6g}\n")


@dataclass
class AuditReport:
    num_agents: int
    num_locations: int
    total_budget: int
    num_arcs: int
    edge_visits: int
    heap_pushes: int
    heap_pops: int
    assignments: int
    path_hops: int
    eliminations: int
    constant: int = AUDIT_C
    full_access: bool = False
    general_bound: int = field(init=False)
    full_access_bound: int | None = field(init=False)

    def __post_init__(self):
        A = self.num_arcs
        self.general_bound = self.constant * (self.total_budget * A
                                              + min(self.num_agents, self.num_locations) * A)
        self.full_access_bound = (self.constant * (self.total_budget + A)
                                  if self.full_access else None)

    @property
    def within_bound(self) -> bool:
        ok = self.edge_visits <= self.general_bound
        if self.full_access_bound is not None:
            ok = ok and self.edge_visits <= self.full_access_bound
        return ok


def complexity_audit(instance: SearchInstance, constant: int = AUDIT_C) -> AuditReport:
    """Solve once and compare the search work against the worst-case bound.

    Edge visits count every adjacency entry the augmenting-path searches
    examine.  For full-access instances the tighter ``c * (N + |A|)`` bound
    is checked as well.
    """
    _, trace = solve(instance)
    s = trace.stats
    full = len(instance.arcs) == instance.num_agents * instance.num_locations
    return AuditReport(instance.num_agents, instance.num_locations, instance.total_budget,
                       len(instance.arcs), s.edge_visits, s.heap_pushes, s.heap_pops,
                       s.assignments, s.path_hops, s.eliminations, constant, full)
