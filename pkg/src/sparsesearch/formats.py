"""JSON file formats for instances and schedules."""

from __future__ import annotations

import json
from pathlib import Path

from .model import Heterogeneous, Homogeneous, Schedule, SearchInstance, objective, validate

INSTANCE_FORMAT = "search-alloc/1"


class FormatError(ValueError):
    pass


def instance_to_json(instance: SearchInstance) -> dict:
    det = instance.detection
    agents = [{"id": instance.agent_label(m), "budget": n} for m, n in enumerate(instance.budgets)]
    locations = []
    for k, p in enumerate(instance.priors):
        loc = {"id": instance.location_label(k), "prior": p}
        if isinstance(det, Homogeneous):
            loc["alpha"] = det.alpha[k]
        locations.append(loc)
    arcs = []
    for m, k in sorted(instance.arcs):
        arc = {"agent": instance.agent_label(m), "location": instance.location_label(k)}
        if isinstance(det, Heterogeneous):
            arc["alpha"] = det.alpha[(m, k)]
        arcs.append(arc)
    return {"format": INSTANCE_FORMAT, "agents": agents, "locations": locations, "arcs": arcs}


def instance_from_json(data: dict) -> SearchInstance:
    """Parse and validate; raises FormatError or model.ValidationError."""
    if data.get("format") != INSTANCE_FORMAT:
        raise FormatError(f"expected format {INSTANCE_FORMAT!r}, got {data.get('format')!r}")
    try:
        agents, locations, arcs = data["agents"], data["locations"], data["arcs"]
        agent_ids = tuple(a["id"] for a in agents)
        location_ids = tuple(loc["id"] for loc in locations)
        if len(set(agent_ids)) != len(agent_ids) or len(set(location_ids)) != len(location_ids):
            raise FormatError("agent and location ids must be unique")
        a_index = {a: i for i, a in enumerate(agent_ids)}
        l_index = {k: i for i, k in enumerate(location_ids)}
        pairs = []
        for arc in arcs:
            if arc["agent"] not in a_index or arc["location"] not in l_index:
                raise FormatError(f"arc {arc} names an unknown agent or location")
            pairs.append((a_index[arc["agent"]], l_index[arc["location"]]))
        loc_style = ["alpha" in loc for loc in locations]
        arc_style = ["alpha" in arc for arc in arcs]
        if all(loc_style) and not any(arc_style):
            det = Homogeneous(tuple(loc["alpha"] for loc in locations))
        elif all(arc_style) and not any(loc_style):
            det = Heterogeneous({p: arc["alpha"] for p, arc in zip(pairs, arcs)})
        else:
            raise FormatError("give alpha either on every location or on every arc, not both")
        inst = SearchInstance(
            budgets=tuple(a["budget"] for a in agents),
            priors=tuple(loc["prior"] for loc in locations),
            arcs=tuple(pairs),
            detection=det,
            agent_ids=agent_ids,
            location_ids=location_ids,
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed instance: {exc!r}") from exc
    return validate(inst)


def schedule_to_json(schedule: Schedule, instance: SearchInstance) -> dict:
    return {
        "objective": objective(schedule, instance),
        "allocation": [
            {"agent": instance.agent_label(m), "location": instance.location_label(k), "count": c}
            for (m, k), c in sorted(schedule.x.items()) if c > 0
        ],
    }


def schedule_from_json(data: dict, instance: SearchInstance) -> Schedule:
    a_index = {instance.agent_label(m): m for m in range(instance.num_agents)}
    l_index = {instance.location_label(k): k for k in range(instance.num_locations)}
    counts: dict[tuple[int, int], int] = {}
    try:
        for row in data["allocation"]:
            if row["agent"] not in a_index or row["location"] not in l_index:
                raise FormatError(f"allocation row {row} names an unknown agent or location")
            key = (a_index[row["agent"]], l_index[row["location"]])
            counts[key] = counts.get(key, 0) + row["count"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed schedule: {exc!r}") from exc
    return Schedule({a: c for a, c in sorted(counts.items())})


def read_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_json(data: dict, path: str | Path | None) -> None:
    text = json.dumps(data, indent=2)
    if path is None or str(path) == "-":
        print(text)
    else:
        Path(path).write_text(text + "\n")
