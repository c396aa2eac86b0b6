"""Dual prices and optimality checks for homogeneous schedules.

Prices live in the minimization form of the network problem (arc costs
``-p_kj``).  Every isolated group gets one common price, the negated value
whose extraction eliminated it, and the global sink is priced at zero.
:func:`verify` then checks dual feasibility, complementary slackness and
strong duality against any schedule, so it also works on hand-made or
corrupted inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .flowsolver import Elimination, Extraction, SolveTrace, Termination
from .model import Homogeneous, Schedule, SearchInstance

TOL = 1e-9


class MalformedTrace(ValueError):
    pass


@dataclass(frozen=True)
class Group:
    sources: tuple[int, ...]
    sinks: tuple[int, ...]
    value: float


@dataclass(frozen=True)
class Certificate:
    source_prices: tuple[float, ...]
    sink_prices: tuple[float, ...]
    groups: tuple[Group, ...]
    global_price: float = 0.0

    def to_json(self) -> dict:
        return {
            "source_prices": list(self.source_prices),
            "sink_prices": list(self.sink_prices),
            "global_price": self.global_price,
            "groups": [{"sources": list(g.sources), "sinks": list(g.sinks), "value": g.value}
                       for g in self.groups],
        }


@dataclass
class Verdict:
    violations: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, condition: str, **detail) -> None:
        self.violations.append({"condition": condition, **detail})

    def to_json(self) -> dict:
        return {"pass": self.passed, "violations": self.violations}


def build_certificate(trace: SolveTrace, instance: SearchInstance) -> Certificate:
    M, K = instance.num_agents, instance.num_locations
    src: list[float | None] = [None] * M
    sink: list[float | None] = [None] * K
    groups = []
    terminated = False
    last = None
    for e in trace.events:
        if isinstance(e, Extraction) and not e.skipped:
            last = e.value
        elif isinstance(e, Elimination):
            price = -e.value
            for m in e.sources:
                src[m] = price
            for k in e.sinks:
                sink[k] = price
            groups.append(Group(e.sources, e.sinks, e.value))
        elif isinstance(e, Termination):
            terminated = True
            if e.last_value is not None:
                last = e.last_value

    rest_src = tuple(m for m in range(M) if src[m] is None)
    rest_sink = tuple(k for k in range(K) if sink[k] is None)
    if rest_src or rest_sink:
        if not terminated or last is None:
            raise MalformedTrace(
                f"agents {rest_src} / locations {rest_sink} have no price and the trace "
                "did not terminate normally")
        for m in rest_src:
            src[m] = -last
        for k in rest_sink:
            sink[k] = -last
        groups.append(Group(rest_src, rest_sink, last))
    return Certificate(tuple(src), tuple(sink), tuple(groups), 0.0)


def _p(instance: SearchInstance, k: int, j: int) -> float:
    # direct evaluation on purpose: independent of the solver's running products
    a = instance.detection.alpha[k]
    return instance.priors[k] * (1.0 - a) ** (j - 1) * a


def dual_objective(certificate: Certificate, instance: SearchInstance) -> float:
    """Value of the dual of the minimization problem at the given prices."""
    N = instance.total_budget
    lam = certificate.global_price
    total = 0.0
    for k, d in enumerate(certificate.sink_prices):
        # terms are nonzero only while p_kj > lam - d; p_kj is nonincreasing in j
        for j in range(1, N + 1):
            term = lam - d - _p(instance, k, j)
            if term >= 0.0:
                break
            total += term
    total += sum(d * n for d, n in zip(certificate.source_prices, instance.budgets))
    return total - lam * N


def verify(schedule: Schedule, certificate: Certificate, instance: SearchInstance,
           tol: float = TOL) -> Verdict:
    """Check a (schedule, prices) pair for optimality; violations are returned, not raised."""
    verdict = Verdict()
    if not isinstance(instance.detection, Homogeneous):
        verdict.add("model", detail="certificates apply to homogeneous instances only")
        return verdict
    M, K, N = instance.num_agents, instance.num_locations, instance.total_budget
    ds, dt, lam = certificate.source_prices, certificate.sink_prices, certificate.global_price
    if len(ds) != M or len(dt) != K:
        verdict.add("shape", detail=f"expected {M} source and {K} sink prices")
        return verdict

    arcs = set(instance.arcs)
    used = [0] * M
    for arc, c in schedule.x.items():
        if arc not in arcs:
            verdict.add("primal", arc=list(arc), detail="flow on a non-accessibility arc")
        elif not isinstance(c, int) or c < 0:
            verdict.add("primal", arc=list(arc), detail=f"count {c!r} not a nonnegative integer")
        else:
            used[arc[0]] += c
    for m in range(M):
        if used[m] != instance.budgets[m]:
            verdict.add("primal", agent=m, detail=f"uses {used[m]} of budget {instance.budgets[m]}")
    if verdict.violations:
        return verdict

    for m, k in sorted(arcs):
        x = schedule.x.get((m, k), 0)
        if ds[m] > dt[k] + tol:
            verdict.add("dual_feasibility", arc=[m, k], source_price=ds[m], sink_price=dt[k])
        if ds[m] < dt[k] - tol and x != 0:
            verdict.add("slack_unused_arc", arc=[m, k], flow=x)
        if x > 0 and abs(ds[m] - dt[k]) > tol:
            verdict.add("slack_used_arc", arc=[m, k], flow=x,
                        source_price=ds[m], sink_price=dt[k])

    # y_kj = 1 exactly for j <= u_k; -p_kj is nondecreasing in j, so checking
    # the last used and the first unused unit of each location covers every j
    u = schedule.totals(K)
    for k in range(K):
        reduced = dt[k] - lam
        if u[k] >= 1:
            c = -_p(instance, k, u[k])
            if reduced < c - tol:
                verdict.add("slack_unused_unit", location=k, j=u[k], cost=c, reduced_price=reduced)
        if u[k] < N:
            c = -_p(instance, k, u[k] + 1)
            if reduced > c + tol:
                verdict.add("slack_used_unit", location=k, j=u[k] + 1, cost=c,
                            reduced_price=reduced)

    primal = sum(p * (1.0 - (1.0 - a) ** n)
                 for p, a, n in zip(instance.priors, instance.detection.alpha, u) if n)
    dual = -dual_objective(certificate, instance)
    if abs(primal - dual) > tol:
        verdict.add("strong_duality", primal=primal, dual=dual)
    return verdict
