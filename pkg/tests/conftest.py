import pytest

from sparsesearch.model import Heterogeneous, Homogeneous, SearchInstance, validate

ACCEPTANCE_LINES: list[str] = []


def hom(budgets, priors, arcs, alpha, check_prior_sum=True):
    """Homogeneous instance from 1-based arcs, as written in the worked examples."""
    inst = SearchInstance(tuple(budgets), tuple(priors),
                          tuple((m - 1, k - 1) for m, k in arcs), Homogeneous(tuple(alpha)))
    return validate(inst, check_prior_sum=check_prior_sum)


def het(budgets, priors, alpha_by_arc):
    arcs = tuple((m - 1, k - 1) for m, k in alpha_by_arc)
    det = Heterogeneous({(m - 1, k - 1): a for (m, k), a in alpha_by_arc.items()})
    return validate(SearchInstance(tuple(budgets), tuple(priors), arcs, det))


def enumerate_optimum(instance):
    """Best objective over every integer flow on the arcs, one arc at a time.

    Written independently of the package's enumerator: it walks the arcs in
    order and tries every count that fits the owning agent's remaining
    budget, instead of enumerating per-agent multisets.
    """
    exact = isinstance(instance.detection, Homogeneous)
    arcs = sorted(instance.arcs)
    K = instance.num_locations

    def value(counts):
        miss = [1.0] * K
        for (m, k), c in zip(arcs, counts):
            a = instance.detection.alpha[k] if exact else instance.detection.alpha[(m, k)]
            miss[k] *= (1.0 - a) ** c
        return sum(p * (1.0 - q) for p, q in zip(instance.priors, miss))

    best = -1.0
    left = list(instance.budgets)
    counts = [0] * len(arcs)

    def rec(i):
        nonlocal best
        if i == len(arcs):
            if not exact or not any(left):
                best = max(best, value(counts))
            return
        m = arcs[i][0]
        for c in range(left[m] + 1):
            counts[i] = c
            left[m] -= c
            rec(i + 1)
            left[m] += c
        counts[i] = 0

    rec(0)
    return best


@pytest.fixture
def ex061():
    # agent 1 -> {1,2} N=1; agent 2 -> {2,3} N=2
    return hom([1, 2], [0.5, 0.3, 0.2], [(1, 1), (1, 2), (2, 2), (2, 3)], [0.5, 0.8, 0.6])


@pytest.fixture
def ex070():
    # priors sum to 1.4 in this worked example; only the sum check is relaxed
    return hom([1, 1], [0.6, 0.8], [(1, 1), (1, 2), (2, 2)], [0.5, 0.5], check_prior_sum=False)


@pytest.fixture
def ex045():
    return hom([1, 1], [0.6, 0.2], [(1, 1), (1, 2), (2, 1)], [0.5, 0.5])


@pytest.fixture
def minimal():
    return hom([1], [0.5], [(1, 1)], [0.5], check_prior_sum=False)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


