"""Random instance generation.

Spatial fields place stationary sensors and candidate locations uniformly in
a rectangle; a sensor can search every location within its sensing radius.
All randomness comes from numpy's PCG64 bit generator seeded with the given
integer, so outputs are reproducible across machines and numpy versions that
keep PCG64 stable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .model import Heterogeneous, Homogeneous, SearchInstance, validate

MAX_ATTEMPTS = 100_000
_BATCH = 256

DrawFn = Callable[[np.random.Generator, int], np.ndarray]


class GenerationFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class SpatialField:
    width: float
    height: float
    sensors: tuple[tuple[float, float], ...]
    locations: tuple[tuple[float, float], ...]
    radius: float
    seed: int

    def with_radius(self, radius: float) -> "SpatialField":
        return replace(self, radius=radius)

    def distances(self) -> np.ndarray:
        s = np.asarray(self.sensors, dtype=float).reshape(-1, 2)
        p = np.asarray(self.locations, dtype=float).reshape(-1, 2)
        return np.hypot(s[:, None, 0] - p[None, :, 0], s[:, None, 1] - p[None, :, 1])

    def arcs(self) -> list[tuple[int, int]]:
        ms, ks = np.nonzero(self.distances() <= self.radius)
        return sorted(zip(ms.tolist(), ks.tolist()))

    def is_covered(self) -> bool:
        hit = self.distances() <= self.radius
        return bool(hit.any(axis=0).all() and hit.any(axis=1).all())

    def to_json(self) -> dict:
        return {"format": "search-field/1", "width": self.width, "height": self.height,
                "radius": self.radius, "seed": self.seed,
                "sensors": [list(p) for p in self.sensors],
                "locations": [list(p) for p in self.locations]}

    @classmethod
    def from_json(cls, data: dict) -> "SpatialField":
        return cls(float(data["width"]), float(data["height"]),
                   tuple(tuple(map(float, p)) for p in data["sensors"]),
                   tuple(tuple(map(float, p)) for p in data["locations"]),
                   float(data["radius"]), int(data["seed"]))


def _resample(rng: np.random.Generator, width: float, height: float,
              anchors: np.ndarray, radius: float, what: str) -> np.ndarray:
    """Uniform point within ``radius`` of some anchor, by rejection."""
    r2 = radius * radius
    tried = 0
    while tried < MAX_ATTEMPTS:
        n = min(_BATCH, MAX_ATTEMPTS - tried)
        cand = rng.random((n, 2)) * (width, height)
        d2 = ((cand[:, None, :] - anchors[None, :, :]) ** 2).sum(axis=2)
        ok = np.nonzero((d2 <= r2).any(axis=1))[0]
        if ok.size:
            return cand[ok[0]]
        tried += n
    raise GenerationFailed(
        f"no position for a {what} within radius {radius} after {MAX_ATTEMPTS} attempts")


def generate_field(num_sensors: int, num_locations: int, radius: float,
                   width: float = 100.0, height: float = 100.0, seed: int = 0) -> SpatialField:
    """Uniform sensors and locations, resampled point by point until every
    location is in range of a sensor and every sensor reaches a location."""
    if num_sensors < 1 or num_locations < 1:
        raise ValueError("need at least one sensor and one location")
    if radius <= 0 or width <= 0 or height <= 0:
        raise ValueError("radius and field dimensions must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    sensors = rng.random((num_sensors, 2)) * (width, height)
    locs = rng.random((num_locations, 2)) * (width, height)
    r2 = radius * radius

    d2 = ((sensors[:, None, :] - locs[None, :, :]) ** 2).sum(axis=2)
    for k in np.nonzero(~(d2 <= r2).any(axis=0))[0]:
        locs[k] = _resample(rng, width, height, sensors, radius, "location")
    # moving a sensor that reaches nothing cannot uncover any location
    d2 = ((sensors[:, None, :] - locs[None, :, :]) ** 2).sum(axis=2)
    for m in np.nonzero(~(d2 <= r2).any(axis=1))[0]:
        sensors[m] = _resample(rng, width, height, locs, radius, "sensor")

    return SpatialField(float(width), float(height),
                        tuple(map(tuple, sensors.tolist())), tuple(map(tuple, locs.tolist())),
                        float(radius), int(seed))


def uniform_priors(rng: np.random.Generator, n: int) -> np.ndarray:
    w = rng.random(n)
    return w / w.sum()


def compile_instance(field: SpatialField, budget_each: int,
                     prior_gen: DrawFn | None = None,
                     alpha_gen: DrawFn | None = None,
                     *, alpha_range: tuple[float, float] = (0.1, 0.9),
                     heterogeneous: bool = False) -> SearchInstance:
    """Search instance for ``field``: arcs by distance, equal budgets.

    Priors and detection probabilities are drawn from a stream derived from
    the field seed only, so the same field compiled at different radii or
    budgets gets the same priors and per-location alphas.
    """
    K = len(field.locations)
    arcs = field.arcs()
    rng = np.random.Generator(np.random.PCG64([field.seed, 1]))
    priors = (prior_gen or uniform_priors)(rng, K)
    lo, hi = alpha_range
    if alpha_gen is None:
        def alpha_gen(r: np.random.Generator, n: int) -> np.ndarray:
            return r.uniform(lo, hi, n)
    if heterogeneous:
        # one value per sensor/location pair, so the arc set can change without
        # reshuffling the alphas of arcs that stay
        table = alpha_gen(rng, len(field.sensors) * K).reshape(len(field.sensors), K)
        det = Heterogeneous({(m, k): float(table[m, k]) for m, k in arcs})
    else:
        det = Homogeneous(tuple(float(a) for a in alpha_gen(rng, K)))
    inst = SearchInstance(
        budgets=(int(budget_each),) * len(field.sensors),
        priors=tuple(float(p) for p in priors),
        arcs=tuple(arcs),
        detection=det,
    )
    return validate(inst)


def random_instance(rng: np.random.Generator, num_agents: int, num_locations: int,
                    total_budget: int, density: float = 0.4,
                    heterogeneous: bool = False, full_access: bool = False,
                    alpha_range: tuple[float, float] = (0.05, 0.95)) -> SearchInstance:
    """Abstract random instance with a random sparse accessibility set.

    Every agent gets at least one unit and every location and agent at least
    one arc.  ``total_budget`` is raised to ``num_agents`` if smaller.
    """
    M, K = num_agents, num_locations
    if full_access:
        acc = np.ones((M, K), dtype=bool)
    else:
        acc = rng.random((M, K)) < density
        for k in range(K):
            if not acc[:, k].any():
                acc[rng.integers(M), k] = True
        for m in range(M):
            if not acc[m].any():
                acc[m, rng.integers(K)] = True
    arcs = [(int(m), int(k)) for m, k in zip(*np.nonzero(acc))]

    N = max(total_budget, M)
    budgets = np.ones(M, dtype=int)
    extra = rng.integers(0, M, N - M)
    np.add.at(budgets, extra, 1)

    priors = rng.random(K)
    priors /= priors.sum()
    lo, hi = alpha_range
    if heterogeneous:
        det = Heterogeneous({a: float(rng.uniform(lo, hi)) for a in arcs})
    else:
        det = Homogeneous(tuple(float(a) for a in rng.uniform(lo, hi, K)))
    return validate(SearchInstance(tuple(int(b) for b in budgets),
                                   tuple(float(p) for p in priors), tuple(arcs), det))
