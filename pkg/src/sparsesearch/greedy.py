"""Greedy allocation when detection depends on both agent and location.

Assignment sets are kept as multiplicities over accessibility arcs rather
than over unit copies of each agent; an agent with budget ``N_m`` may appear
up to ``N_m`` times in total.  Independence in the partition matroid is then
just "no agent exceeds its budget".
"""

from __future__ import annotations

import heapq
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping

from .model import Heterogeneous, Schedule, SearchInstance

REKEY_TOL = 1e-12
PROPERTY_TOL = 1e-12


class InfeasibleSet(ValueError):
    pass


def _alpha(instance: SearchInstance) -> Mapping[tuple[int, int], float]:
    det = instance.detection
    if isinstance(det, Heterogeneous):
        return det.alpha
    return {(m, k): det.alpha[k] for m, k in instance.arcs}


def is_feasible(S: Mapping[tuple[int, int], int], instance: SearchInstance) -> bool:
    arcs = set(instance.arcs)
    used = [0] * instance.num_agents
    for arc, c in S.items():
        if c < 0 or (c and arc not in arcs):
            return False
        used[arc[0]] += c
    return all(u <= n for u, n in zip(used, instance.budgets))


def f_value(S: Mapping[tuple[int, int], int], instance: SearchInstance) -> float:
    """Detection probability of the assignment multiset ``S``."""
    if not is_feasible(S, instance):
        raise InfeasibleSet(f"{dict(S)} violates accessibility or budgets")
    alpha = _alpha(instance)
    miss = [1.0] * instance.num_locations
    for (m, k), c in S.items():
        if c:
            miss[k] *= (1.0 - alpha[(m, k)]) ** c
    return sum(p * (1.0 - q) for p, q in zip(instance.priors, miss))


def greedy_solve(instance: SearchInstance) -> Schedule:
    """Heap-based greedy with per-location entries ``(gain, location, agent)``.

    The entry of a location always names the best supplied accessor known
    when it was pushed.  If that agent has run dry by the time the entry is
    popped, the entry is re-keyed to the next best supplied accessor by
    scaling the gain with the ratio of detection probabilities.
    """
    alpha = _alpha(instance)
    accessors = instance.agents_of()
    R = list(instance.budgets)
    x: Counter = Counter()
    miss = [1.0] * instance.num_locations  # running check on re-keyed gains

    def best_supplied(k: int) -> int | None:
        best = None
        for m in accessors[k]:
            if R[m] > 0 and (best is None or alpha[(m, k)] > alpha[(best, k)]):
                best = m
        return best

    heap = []
    for k, p0 in enumerate(instance.priors):
        m = best_supplied(k)
        heap.append((-(alpha[(m, k)] * p0), k, m))
    heapq.heapify(heap)

    while heap:
        negv, k, m = heapq.heappop(heap)
        v = -negv
        if R[m] > 0:
            x[(m, k)] += 1
            R[m] -= 1
            a = alpha[(m, k)]
            miss[k] *= 1.0 - a
            heapq.heappush(heap, (-(v * (1.0 - a)), k, m))
            continue
        m2 = best_supplied(k)
        if m2 is None:
            continue
        v2 = v * alpha[(m2, k)] / alpha[(m, k)]
        assert math.isclose(v2, instance.priors[k] * alpha[(m2, k)] * miss[k],
                            rel_tol=REKEY_TOL, abs_tol=REKEY_TOL), (v2, k, m2)
        heapq.heappush(heap, (-v2, k, m2))
    return Schedule.from_counts(x)


def naive_greedy(instance: SearchInstance) -> Schedule:
    """Textbook greedy: rescan every arc for the best marginal gain each step."""
    alpha = _alpha(instance)
    arcs = sorted(instance.arcs, key=lambda a: (a[1], a[0]))
    R = list(instance.budgets)
    x: Counter = Counter()
    while True:
        miss = [1.0] * instance.num_locations
        for (m, k), c in x.items():
            miss[k] *= (1.0 - alpha[(m, k)]) ** c
        best, best_arc = -1.0, None
        for m, k in arcs:
            if R[m] == 0:
                continue
            gain = instance.priors[k] * alpha[(m, k)] * miss[k]
            if gain > best:
                best, best_arc = gain, (m, k)
        if best_arc is None:
            return Schedule.from_counts(x)
        x[best_arc] += 1
        R[best_arc[0]] -= 1


@dataclass
class PropertyVerdict:
    trials: int = 0
    counterexamples: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples


def _random_feasible(instance: SearchInstance, rng: random.Random,
                     cap: list[int] | None = None) -> Counter:
    """Random multiset with per-agent usage at most ``cap`` (default: budgets)."""
    per_agent = instance.locations_of()
    cap = list(instance.budgets) if cap is None else cap
    S: Counter = Counter()
    for m, locs in enumerate(per_agent):
        for _ in range(rng.randint(0, cap[m])):
            S[(m, rng.choice(locs))] += 1
    return S


def _random_subset(S: Counter, rng: random.Random) -> Counter:
    return Counter({arc: rng.randint(0, c) for arc, c in S.items()})


def _usage(S: Mapping[tuple[int, int], int], M: int) -> list[int]:
    used = [0] * M
    for (m, _), c in S.items():
        used[m] += c
    return used


def check_submodular(instance: SearchInstance, trials: int = 1000, seed: int = 0) -> PropertyVerdict:
    """Random chains S' <= S and extra units e: monotonicity and diminishing returns."""
    rng = random.Random(seed)
    M = instance.num_agents
    per_agent = instance.locations_of()
    out = PropertyVerdict()
    for _ in range(trials):
        # leave headroom for e: draw S within budgets minus one for some agent
        spare = rng.randrange(M)
        cap = [n - (m == spare) for m, n in enumerate(instance.budgets)]
        S = _random_feasible(instance, rng, cap)
        Sp = _random_subset(S, rng)
        e = (spare, rng.choice(per_agent[spare]))
        fS, fSp = f_value(S, instance), f_value(Sp, instance)
        gain_small = f_value(Sp + Counter({e: 1}), instance) - fSp
        gain_big = f_value(S + Counter({e: 1}), instance) - fS
        out.trials += 1
        if fSp > fS + PROPERTY_TOL:
            out.counterexamples.append({"kind": "monotone", "S_prime": dict(Sp), "S": dict(S)})
        if gain_small < gain_big - PROPERTY_TOL:
            out.counterexamples.append({"kind": "submodular", "S_prime": dict(Sp), "S": dict(S),
                                        "e": e, "gains": (gain_small, gain_big)})
    return out


def check_matroid(instance: SearchInstance, trials: int = 1000, seed: int = 0) -> PropertyVerdict:
    """Hereditary and augmentation properties of the budget-constrained sets."""
    rng = random.Random(seed)
    M = instance.num_agents
    out = PropertyVerdict()
    for _ in range(trials):
        S = _random_feasible(instance, rng)
        sub = _random_subset(S, rng)
        out.trials += 1
        if not is_feasible(sub, instance):
            out.counterexamples.append({"kind": "hereditary", "S": dict(S), "subset": dict(sub)})

        Sp = _random_feasible(instance, rng)
        small, big = (Sp, S) if sum(Sp.values()) < sum(S.values()) else (S, Sp)
        if sum(small.values()) == sum(big.values()):
            continue
        used = _usage(small, M)
        ok = any(c > small.get(arc, 0) and used[arc[0]] < instance.budgets[arc[0]]
                 and is_feasible(small + Counter({arc: 1}), instance)
                 for arc, c in big.items())
        if not ok:
            out.counterexamples.append({"kind": "augmentation", "small": dict(small),
                                        "big": dict(big)})
    return out
