"""Core data types for sparse multi-agent discrete search.

Agents and locations are addressed by zero-based indices internally.  The
optional ``agent_ids`` / ``location_ids`` carry the labels used in JSON files
so that a load/save round trip preserves them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

Arc = tuple[int, int]

PRIOR_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Homogeneous:
    """Detection probability depends only on the location."""

    alpha: tuple[float, ...]


@dataclass(frozen=True)
class Heterogeneous:
    """Detection probability per accessibility arc ``(agent, location)``."""

    alpha: Mapping[Arc, float]


DetectionModel = Union[Homogeneous, Heterogeneous]


@dataclass(frozen=True)
class Issue:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


class ValidationError(ValueError):
    """Raised by :func:`validate`; ``issues`` lists every violated invariant."""

    def __init__(self, issues: list[Issue]):
        self.issues = issues
        super().__init__("; ".join(str(i) for i in issues))

    @property
    def codes(self) -> set[str]:
        return {i.code for i in self.issues}


class ScheduleInstanceMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SearchInstance:
    budgets: tuple[int, ...]
    priors: tuple[float, ...]
    arcs: tuple[Arc, ...]
    detection: DetectionModel
    agent_ids: tuple | None = None
    location_ids: tuple | None = None

    @property
    def num_agents(self) -> int:
        return len(self.budgets)

    @property
    def num_locations(self) -> int:
        return len(self.priors)

    @property
    def total_budget(self) -> int:
        return sum(self.budgets)

    @property
    def homogeneous(self) -> bool:
        return isinstance(self.detection, Homogeneous)

    def agent_label(self, m: int):
        return self.agent_ids[m] if self.agent_ids is not None else m

    def location_label(self, k: int):
        return self.location_ids[k] if self.location_ids is not None else k

    def agents_of(self) -> list[list[int]]:
        """Accessing agents per location, ascending."""
        out: list[list[int]] = [[] for _ in range(self.num_locations)]
        for m, k in sorted(self.arcs):
            out[k].append(m)
        return out

    def locations_of(self) -> list[list[int]]:
        """Accessible locations per agent, ascending."""
        out: list[list[int]] = [[] for _ in range(self.num_agents)]
        for m, k in sorted(self.arcs):
            out[m].append(k)
        return out

    def arc_alpha(self, m: int, k: int) -> float:
        if isinstance(self.detection, Homogeneous):
            return self.detection.alpha[k]
        return self.detection.alpha[(m, k)]


@dataclass(frozen=True)
class Schedule:
    """Integer effort allocation ``x[(m, k)]``; only positive counts are stored."""

    x: Mapping[Arc, int] = field(default_factory=dict)

    @classmethod
    def from_counts(cls, counts: Mapping[Arc, int]) -> "Schedule":
        return cls({a: int(c) for a, c in sorted(counts.items()) if c})

    def totals(self, num_locations: int) -> list[int]:
        u = [0] * num_locations
        for (_, k), c in self.x.items():
            u[k] += c
        return u

    def agent_usage(self, num_agents: int) -> list[int]:
        used = [0] * num_agents
        for (m, _), c in self.x.items():
            used[m] += c
        return used

    def size(self) -> int:
        return sum(self.x.values())


def _bad_prob(v) -> bool:
    return not isinstance(v, (int, float)) or math.isnan(v)


def validate(instance: SearchInstance, *, check_prior_sum: bool = True) -> SearchInstance:
    """Return ``instance`` unchanged if it is legal, else raise ValidationError.

    ``check_prior_sum=False`` treats priors as independent per-location
    weights in [0, 1]; the optimization itself does not depend on their sum.
    """
    issues: list[Issue] = []
    M, K = instance.num_agents, instance.num_locations
    if M == 0 or K == 0:
        issues.append(Issue("EmptyInstance", f"{M} agents, {K} locations"))
        raise ValidationError(issues)

    for m, n in enumerate(instance.budgets):
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            issues.append(Issue("BadBudget", f"agent {m} budget {n!r} must be a positive integer"))

    priors_ok = True
    for k, p in enumerate(instance.priors):
        if _bad_prob(p) or not 0.0 <= p <= 1.0:
            issues.append(Issue("BadProbability", f"prior of location {k} is {p!r}"))
            priors_ok = False
    if priors_ok and check_prior_sum:
        total = sum(instance.priors)
        if total > 1.0 + PRIOR_SUM_TOL:
            issues.append(Issue("BadProbability", f"priors sum to {total:.12g} > 1"))
        elif total < 1.0 - PRIOR_SUM_TOL:
            warnings.warn(f"priors sum to {total:.6g} < 1; the object may be absent", stacklevel=2)

    seen: set[Arc] = set()
    agent_hit = [False] * M
    loc_hit = [False] * K
    for arc in instance.arcs:
        m, k = arc
        if not (0 <= m < M and 0 <= k < K):
            issues.append(Issue("BadArc", f"arc {arc} out of range"))
            continue
        if arc in seen:
            issues.append(Issue("DuplicateArc", f"arc {arc} listed twice"))
        seen.add(arc)
        agent_hit[m] = loc_hit[k] = True
    for k in range(K):
        if not loc_hit[k]:
            issues.append(Issue("IsolatedLocation", f"location {k} has no accessing agent"))
    for m in range(M):
        if not agent_hit[m]:
            issues.append(Issue("IsolatedAgent", f"agent {m} accesses no location"))

    det = instance.detection
    if isinstance(det, Homogeneous):
        if len(det.alpha) != K:
            issues.append(Issue("BadDetection", f"{len(det.alpha)} alphas for {K} locations"))
        for k, a in enumerate(det.alpha):
            if _bad_prob(a) or not 0.0 < a <= 1.0:
                issues.append(Issue("BadProbability", f"alpha of location {k} is {a!r}, need (0, 1]"))
    else:
        if set(det.alpha) != seen:
            issues.append(Issue("BadDetection", "per-arc alphas must cover exactly the arc set"))
        for arc, a in sorted(det.alpha.items()):
            if _bad_prob(a) or not 0.0 < a <= 1.0:
                issues.append(Issue("BadProbability", f"alpha of arc {arc} is {a!r}, need (0, 1]"))

    if issues:
        raise ValidationError(issues)
    return instance


def marginal_value(k: int, j: int, instance: SearchInstance) -> float:
    """Probability that the j-th search of location k is the first to find the object."""
    if j < 1:
        raise IndexError(f"search index j={j} must be >= 1")
    if not isinstance(instance.detection, Homogeneous):
        raise TypeError("marginal_value needs a homogeneous detection model")
    a = instance.detection.alpha[k]
    return instance.priors[k] * (1.0 - a) ** (j - 1) * a


def marginal_values(k: int, instance: SearchInstance) -> Iterator[float]:
    """Yield p_k1, p_k2, ... by repeated multiplication."""
    a = instance.detection.alpha[k]
    miss = 1.0 - a
    p = instance.priors[k] * a
    while True:
        yield p
        p *= miss


def check_schedule(schedule: Schedule, instance: SearchInstance) -> None:
    arcs = set(instance.arcs)
    used = [0] * instance.num_agents
    for arc, c in schedule.x.items():
        if arc not in arcs:
            raise ScheduleInstanceMismatch(f"allocation on {arc}, which is not an accessibility arc")
        if not isinstance(c, int) or c < 0:
            raise ScheduleInstanceMismatch(f"count {c!r} on {arc} is not a nonnegative integer")
        used[arc[0]] += c
    for m, (u, n) in enumerate(zip(used, instance.budgets)):
        if u > n:
            raise ScheduleInstanceMismatch(f"agent {m} uses {u} > budget {n}")


def objective(schedule: Schedule, instance: SearchInstance) -> float:
    """Total detection probability of ``schedule``."""
    check_schedule(schedule, instance)
    det = instance.detection
    if isinstance(det, Homogeneous):
        u = schedule.totals(instance.num_locations)
        return sum(
            p * (1.0 - (1.0 - a) ** n) for p, a, n in zip(instance.priors, det.alpha, u) if n
        )
    miss = [1.0] * instance.num_locations
    for (m, k), c in schedule.x.items():
        miss[k] *= (1.0 - det.alpha[(m, k)]) ** c
    return sum(p * (1.0 - q) for p, q in zip(instance.priors, miss))
