"""Reference solvers: a generic min-cost flow on the explicit network, and
exhaustive enumeration for tiny instances.

The min-cost flow is plain successive shortest paths with node potentials.
It is the comparison class for the benchmarks, not a port of any particular
library.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
import warnings
from dataclasses import dataclass

from .model import Homogeneous, Schedule, SearchInstance

UNIT_ARC_WARN = 10**7
BRUTE_FORCE_LIMIT = 10**7
INF = float("inf")


class TooLarge(ValueError):
    pass


class BaselineTimeout(TimeoutError):
    pass


@dataclass
class FlowNetwork:
    """Sources ``s_m``, sinks ``t_k`` and one global sink.

    ``transfer_arcs`` are the zero-cost ``s_m -> t_k`` arcs (capacity
    ``N_m``); ``unit_costs[k][j-1]`` is the cost ``-p_kj`` of the j-th
    unit-capacity arc ``t_k -> global sink``.
    """

    supplies: list[int]
    transfer_arcs: list[tuple[int, int]]
    unit_costs: list[list[float]]

    @property
    def num_sources(self) -> int:
        return len(self.supplies)

    @property
    def num_sinks(self) -> int:
        return len(self.unit_costs)

    @property
    def demand(self) -> int:
        return sum(self.supplies)

    @property
    def num_unit_arcs(self) -> int:
        return sum(len(c) for c in self.unit_costs)

    def capacity(self, arc: tuple[int, int]) -> int:
        return self.supplies[arc[0]]


def build_network(instance: SearchInstance) -> FlowNetwork:
    det = instance.detection
    if not isinstance(det, Homogeneous):
        raise TypeError("the network formulation needs a homogeneous detection model")
    N = instance.total_budget
    if instance.num_locations * N > UNIT_ARC_WARN:
        warnings.warn(f"materializing {instance.num_locations * N} unit arcs", stacklevel=2)
    unit_costs = []
    for p0, a in zip(instance.priors, det.alpha):
        costs = []
        p = p0 * a
        for _ in range(N):
            costs.append(-p)
            p *= 1.0 - a
        unit_costs.append(costs)
    return FlowNetwork(list(instance.budgets), sorted(instance.arcs), unit_costs)


def solve_mincost(network: FlowNetwork, timeout_s: float | None = None) -> tuple[Schedule, float]:
    """Successive shortest paths from a super source, one unit per path.

    Node order: super source 0, sources ``1..M``, sinks ``M+1..M+K``, global
    sink ``M+K+1``.  Parallel unit arcs of one sink have nondecreasing costs,
    so a shortest path only ever uses the cheapest residual one; flow on a
    bundle therefore always occupies a prefix and is tracked by a counter.
    """
    deadline = None if timeout_s is None else time.monotonic() + timeout_s
    M, K = network.num_sources, network.num_sinks
    S, T = 0, M + K + 1
    n_nodes = M + K + 2
    residual = list(network.supplies)
    src_out: list[list[int]] = [[] for _ in range(M)]
    for m, k in network.transfer_arcs:
        src_out[m].append(k)
    flow: dict[tuple[int, int], int] = {}
    sink_in: list[dict[int, int]] = [{} for _ in range(K)]  # k -> {m: flow > 0}
    used = [0] * K
    costs = network.unit_costs

    # the network is layered, so one forward pass gives exact distances
    pot = [0.0] * n_nodes
    pot[T] = min((c[0] for c in costs if c), default=0.0)

    for _ in range(network.demand):
        if deadline is not None and time.monotonic() > deadline:
            raise BaselineTimeout(f"min-cost flow exceeded {timeout_s} s")
        dist = [INF] * n_nodes
        prev = [-1] * n_nodes
        dist[S] = 0.0
        heap = [(0.0, S)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            if u == S:
                for m in range(M):
                    if residual[m] > 0:
                        v = 1 + m
                        nd = d + pot[S] - pot[v]
                        if nd < dist[v]:
                            dist[v] = nd
                            prev[v] = u
                            heapq.heappush(heap, (nd, v))
            elif u <= M:
                m = u - 1
                for k in src_out[m]:
                    v = 1 + M + k
                    if flow.get((m, k), 0) >= network.supplies[m]:
                        continue
                    nd = d + pot[u] - pot[v]
                    if nd < dist[v]:
                        dist[v] = nd
                        prev[v] = u
                        heapq.heappush(heap, (nd, v))
            elif u != T:
                k = u - 1 - M
                for m in sink_in[k]:
                    v = 1 + m
                    nd = d + pot[u] - pot[v]
                    if nd < dist[v]:
                        dist[v] = nd
                        prev[v] = u
                        heapq.heappush(heap, (nd, v))
                if used[k] < len(costs[k]):
                    nd = d + costs[k][used[k]] + pot[u] - pot[T]
                    if nd < dist[T]:
                        dist[T] = nd
                        prev[T] = u
                        heapq.heappush(heap, (nd, T))
        if dist[T] == INF:
            raise RuntimeError("internal error: demand left without an augmenting path")
        top = max(d for d in dist if d < INF)
        for v in range(n_nodes):
            pot[v] += dist[v] if dist[v] < INF else top

        v = T
        while v != S:
            u = prev[v]
            if u == S:
                residual[v - 1] -= 1
            elif u <= M:
                m, k = u - 1, v - 1 - M
                flow[(m, k)] = flow.get((m, k), 0) + 1
                sink_in[k][m] = flow[(m, k)]
            elif v == T:
                used[u - 1 - M] += 1
            else:
                k, m = u - 1 - M, v - 1
                flow[(m, k)] -= 1
                if flow[(m, k)]:
                    sink_in[k][m] = flow[(m, k)]
                else:
                    del sink_in[k][m]
            v = u

    value = -sum(sum(costs[k][:used[k]]) for k in range(K))
    return Schedule.from_counts(flow), value


def _multisets(locs: list[int], size: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations_with_replacement(locs, size))


def brute_force(instance: SearchInstance) -> tuple[Schedule, float]:
    """Exact optimum by enumerating every agent's multiset of searched locations.

    Homogeneous instances spend every budget exactly; heterogeneous ones may
    leave effort unused.
    """
    exact = isinstance(instance.detection, Homogeneous)
    per_agent = instance.locations_of()
    count = 1
    for locs, n in zip(per_agent, instance.budgets):
        count *= math.comb(len(locs) + n - 1, n) if exact else math.comb(len(locs) + n, n)
    if count > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"{count} allocations to enumerate (limit {BRUTE_FORCE_LIMIT})")

    options = []
    for locs, n in zip(per_agent, instance.budgets):
        sizes = [n] if exact else range(n + 1)
        options.append([ms for s in sizes for ms in _multisets(locs, s)])

    K = instance.num_locations
    priors = instance.priors
    if exact:
        alpha = instance.detection.alpha
    best, best_choice = -1.0, None
    for choice in itertools.product(*options):
        if exact:
            u = [0] * K
            for ms in choice:
                for k in ms:
                    u[k] += 1
            val = sum(priors[k] * (1.0 - (1.0 - alpha[k]) ** u[k]) for k in range(K) if u[k])
        else:
            miss = [1.0] * K
            for m, ms in enumerate(choice):
                for k in ms:
                    miss[k] *= 1.0 - instance.detection.alpha[(m, k)]
            val = sum(p * (1.0 - q) for p, q in zip(priors, miss))
        if val > best:
            best, best_choice = val, choice

    counts: dict[tuple[int, int], int] = {}
    for m, ms in enumerate(best_choice):
        for k in ms:
            counts[(m, k)] = counts.get((m, k), 0) + 1
    return Schedule.from_counts(counts), best
