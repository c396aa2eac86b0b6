"""Primal-dual min-cost-flow solver for the homogeneous sparse search problem.

The solver never builds the explicit network.  A min-heap holds, for every
live location ``k``, the cost ``-p_kj`` of its next unit of demand.  Each pop
tries to route that unit to an agent with residual supply along an
alternating path (breadth-first, sinks -> sources over accessibility arcs,
sources -> sinks over arcs that carry flow).  A failed search isolates the
visited nodes, which are then dropped for good.

Dual prices are never computed here; the returned :class:`SolveTrace` holds
what :mod:`sparsesearch.certificate` needs to reconstruct them.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Union

from .model import Homogeneous, Schedule, SearchInstance


@dataclass(frozen=True, slots=True)
class Extraction:
    location: int
    j: int
    value: float
    skipped: bool = False


@dataclass(frozen=True, slots=True)
class Assignment:
    # alternating sink, source, sink, ..., source; starts at the demanding sink
    path: tuple[int, ...]

    @property
    def agent(self) -> int:
        return self.path[-1]

    @property
    def hops(self) -> int:
        return len(self.path) - 1


@dataclass(frozen=True, slots=True)
class Elimination:
    sources: tuple[int, ...]
    sinks: tuple[int, ...]
    value: float


@dataclass(frozen=True, slots=True)
class Termination:
    last_value: float | None


Event = Union[Extraction, Assignment, Elimination, Termination]


@dataclass
class SolveStats:
    edge_visits: int = 0
    heap_pushes: int = 0
    heap_pops: int = 0
    skipped_pops: int = 0
    assignments: int = 0
    path_hops: int = 0
    eliminations: int = 0


@dataclass
class SolveTrace:
    events: list[Event] = field(default_factory=list)
    stats: SolveStats = field(default_factory=SolveStats)

    def of_type(self, kind: type) -> list:
        return [e for e in self.events if isinstance(e, kind)]

    def to_json(self, instance: SearchInstance) -> dict:
        agent, loc = instance.agent_label, instance.location_label
        out = []
        for e in self.events:
            if isinstance(e, Extraction):
                out.append({"type": "extraction", "location": loc(e.location), "j": e.j,
                            "value": e.value, "skipped": e.skipped})
            elif isinstance(e, Assignment):
                nodes = [{"sink": loc(v)} if i % 2 == 0 else {"source": agent(v)}
                         for i, v in enumerate(e.path)]
                out.append({"type": "assignment", "path": nodes, "agent": agent(e.agent)})
            elif isinstance(e, Elimination):
                out.append({"type": "elimination", "sources": [agent(m) for m in e.sources],
                            "sinks": [loc(k) for k in e.sinks], "value": e.value})
            else:
                out.append({"type": "termination", "last_value": e.last_value})
        return {"format": "search-alloc-trace/1", "events": out,
                "stats": vars(self.stats).copy()}

    @classmethod
    def from_json(cls, data: dict, instance: SearchInstance) -> "SolveTrace":
        agents = {instance.agent_label(m): m for m in range(instance.num_agents)}
        locs = {instance.location_label(k): k for k in range(instance.num_locations)}
        events: list[Event] = []
        for e in data["events"]:
            kind = e["type"]
            if kind == "extraction":
                events.append(Extraction(locs[e["location"]], int(e["j"]), float(e["value"]),
                                         bool(e.get("skipped", False))))
            elif kind == "assignment":
                path = tuple(locs[n["sink"]] if "sink" in n else agents[n["source"]]
                             for n in e["path"])
                events.append(Assignment(path))
            elif kind == "elimination":
                events.append(Elimination(tuple(agents[a] for a in e["sources"]),
                                          tuple(locs[k] for k in e["sinks"]), float(e["value"])))
            elif kind == "termination":
                v = e["last_value"]
                events.append(Termination(None if v is None else float(v)))
            else:
                raise ValueError(f"unknown trace event type {kind!r}")
        stats = SolveStats(**data.get("stats", {}))
        return cls(events, stats)


@dataclass(frozen=True)
class NoPath:
    """Nodes visited by a failed augmenting-path search."""

    sources: tuple[int, ...]
    sinks: tuple[int, ...]


class SolverState:
    """Residual supplies, flows and elimination flags of one solve.

    Arcs are numbered in ``(agent, location)`` order; ``x[a]`` is the flow on
    arc ``a``.  Adjacency lists are ascending so that scans are deterministic.
    """

    def __init__(self, instance: SearchInstance):
        M, K = instance.num_agents, instance.num_locations
        arcs = sorted(instance.arcs)
        self.instance = instance
        self.arc_src = [m for m, _ in arcs]
        self.arc_sink = [k for _, k in arcs]
        self.x = [0] * len(arcs)
        self.residual = list(instance.budgets)
        self.src_sinks: list[list[int]] = [[] for _ in range(M)]
        self.src_arcs: list[list[int]] = [[] for _ in range(M)]
        self.sink_srcs: list[list[int]] = [[] for _ in range(K)]
        self.sink_arcs: list[list[int]] = [[] for _ in range(K)]
        for a, (m, k) in enumerate(arcs):
            self.src_sinks[m].append(k)
            self.src_arcs[m].append(a)
        for a in sorted(range(len(arcs)), key=lambda a: (arcs[a][1], arcs[a][0])):
            m, k = arcs[a]
            self.sink_srcs[k].append(m)
            self.sink_arcs[k].append(a)
        self.src_eliminated = [False] * M
        self.sink_eliminated = [False] * K
        # sink_srcs[k][:first_supplied[k]] all have zero residual; residuals never grow back
        self.first_supplied = [0] * K
        self._stamp = 0
        self._src_seen = [0] * M
        self._sink_seen = [0] * K
        self._src_pred = [-1] * M
        self._sink_pred = [-1] * K
        self.stats = SolveStats()
        self.last_path: tuple[int, ...] = ()

    def assign_extra_demand(self, t: int) -> int | NoPath:
        """Route one more unit of demand at sink ``t`` to a supplied agent.

        On success the flows along the path are updated (so ``u_t`` grows by
        one) and the terminal agent is returned; its residual is left for the
        caller to decrement.  On failure nothing changes and the visited
        nodes are returned.
        """
        if self.sink_eliminated[t]:
            raise ValueError(f"sink {t} is eliminated")
        self._stamp += 1
        stamp = self._stamp
        R, x = self.residual, self.x
        src_seen, sink_seen = self._src_seen, self._sink_seen
        src_pred, sink_pred = self._src_pred, self._sink_pred
        src_elim, sink_elim = self.src_eliminated, self.sink_eliminated
        visits = 0

        sink_seen[t] = stamp
        sink_pred[t] = -1
        queue = deque([t])
        seen_sources: list[int] = []
        seen_sinks: list[int] = [t]
        while queue:
            node = queue.popleft()
            if node >= 0:
                k = node
                srcs = self.sink_srcs[k]
                p = self.first_supplied[k]
                while p < len(srcs) and R[srcs[p]] == 0:
                    p += 1
                    visits += 1
                self.first_supplied[k] = p
                if p < len(srcs):
                    visits += 1
                    m = srcs[p]
                    src_pred[m] = self.sink_arcs[k][p]
                    self.stats.edge_visits += visits
                    self._augment(m)
                    return m
                arcs_k = self.sink_arcs[k]
                for i, m in enumerate(srcs):
                    visits += 1
                    if src_elim[m] or src_seen[m] == stamp:
                        continue
                    src_seen[m] = stamp
                    src_pred[m] = arcs_k[i]
                    seen_sources.append(m)
                    queue.append(~m)
            else:
                m = ~node
                arcs_m = self.src_arcs[m]
                for i, k in enumerate(self.src_sinks[m]):
                    visits += 1
                    a = arcs_m[i]
                    if x[a] == 0 or sink_elim[k] or sink_seen[k] == stamp:
                        continue
                    sink_seen[k] = stamp
                    sink_pred[k] = a
                    seen_sinks.append(k)
                    queue.append(k)
        self.stats.edge_visits += visits
        return NoPath(tuple(sorted(seen_sources)), tuple(sorted(seen_sinks)))

    def _augment(self, m: int) -> None:
        x = self.x
        path = [m]
        a = self._src_pred[m]
        x[a] += 1
        k = self.arc_sink[a]
        path.append(k)
        while self._sink_pred[k] != -1:
            a = self._sink_pred[k]
            x[a] -= 1
            m = self.arc_src[a]
            path.append(m)
            a = self._src_pred[m]
            x[a] += 1
            k = self.arc_sink[a]
            path.append(k)
        path.reverse()
        self.last_path = tuple(path)
        self.stats.path_hops += len(path) - 1

    def eliminate_group(self, visited: NoPath) -> None:
        for m in visited.sources:
            self.src_eliminated[m] = True
        for k in visited.sinks:
            self.sink_eliminated[k] = True
        self.stats.eliminations += 1

    def schedule(self) -> Schedule:
        counts = {}
        for a, c in enumerate(self.x):
            if c:
                counts[(self.arc_src[a], self.arc_sink[a])] = c
        return Schedule.from_counts(counts)


def solve(instance: SearchInstance) -> tuple[Schedule, SolveTrace]:
    """Optimal allocation for a validated homogeneous instance.

    Heap ties are broken by ascending (location, j).
    """
    det = instance.detection
    if not isinstance(det, Homogeneous):
        raise TypeError("solve needs a homogeneous detection model; use greedy_solve")
    state = SolverState(instance)
    stats = state.stats
    events: list[Event] = []
    miss = [1.0 - a for a in det.alpha]

    heap = [(-(p * a), k, 1) for k, (p, a) in enumerate(zip(instance.priors, det.alpha))]
    heapq.heapify(heap)
    stats.heap_pushes += len(heap)
    last_value = None
    while heap:
        cost, k, j = heapq.heappop(heap)
        stats.heap_pops += 1
        value = -cost
        if state.sink_eliminated[k]:
            stats.skipped_pops += 1
            events.append(Extraction(k, j, value, skipped=True))
            continue
        events.append(Extraction(k, j, value))
        last_value = value
        result = state.assign_extra_demand(k)
        if isinstance(result, NoPath):
            state.eliminate_group(result)
            events.append(Elimination(result.sources, result.sinks, value))
        else:
            state.residual[result] -= 1
            stats.assignments += 1
            events.append(Assignment(state.last_path))
            heapq.heappush(heap, (-(value * miss[k]), k, j + 1))
            stats.heap_pushes += 1
    if any(state.residual):
        raise RuntimeError(f"internal error: unplaced supply {state.residual}")
    events.append(Termination(last_value))
    return state.schedule(), SolveTrace(events, stats)
