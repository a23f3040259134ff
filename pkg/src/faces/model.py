"""Domain types, temporal slicing and service aggregation.

Times are integer minutes, energies are floats in mAh. Intervals are half-open
``[start, end)``. A service delivers its capacity at a constant rate over its
interval, so the energy it contributes to any sub-interval is prorated by
overlap length.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

logger = logging.getLogger(__name__)

TOL = 1e-9


class ScenarioError(ValueError):
    """Raised for malformed or inconsistent scenarios."""


@dataclass(frozen=True)
class EnergyService:
    id: str
    owner_id: str
    start: int
    end: int
    dec: float
    meta: Mapping[str, Any] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        if not self.start < self.end:
            raise ScenarioError(f"service {self.id!r}: start {self.start} must be < end {self.end}")
        if self.dec < 0:
            raise ScenarioError(f"service {self.id!r}: negative capacity {self.dec}")

    @property
    def rate(self) -> float:
        return self.dec / (self.end - self.start)

    def energy_in(self, t0: float, t1: float) -> float:
        """Energy delivered inside ``[t0, t1)`` under uniform power."""
        overlap = min(self.end, t1) - max(self.start, t0)
        if overlap <= 0:
            return 0.0
        return self.dec * overlap / (self.end - self.start)


@dataclass(frozen=True)
class EnergyRequest:
    id: str
    start: int
    end: int
    re: float
    arrival_rank: int
    meta: Mapping[str, Any] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        if not self.start < self.end:
            raise ScenarioError(f"request {self.id!r}: start {self.start} must be < end {self.end}")
        if not self.re > 0:
            raise ScenarioError(f"request {self.id!r}: required energy must be > 0, got {self.re}")

    def covers(self, t0: float, t1: float) -> bool:
        return self.start <= t0 and t1 <= self.end


@dataclass(frozen=True)
class Scenario:
    """One microcell over one batching window."""

    window: tuple[int, int]
    services: tuple[EnergyService, ...] = ()
    requests: tuple[EnergyRequest, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(self.window))
        object.__setattr__(self, "services", tuple(self.services))
        object.__setattr__(self, "requests", tuple(self.requests))
        w0, w1 = self.window
        if not w0 < w1:
            raise ScenarioError(f"empty window [{w0}, {w1}]")
        for kind, items in (("service", self.services), ("request", self.requests)):
            seen = set()
            for item in items:
                if item.id in seen:
                    raise ScenarioError(f"duplicate {kind} id {item.id!r}")
                seen.add(item.id)
                if item.start < w0 or item.end > w1:
                    raise ScenarioError(
                        f"{kind} {item.id!r} [{item.start}, {item.end}] lies outside window [{w0}, {w1}]"
                    )
        ranks = [r.arrival_rank for r in self.requests]
        if len(set(ranks)) != len(ranks):
            raise ScenarioError("arrival_rank values must be unique")

    @property
    def agg_e(self) -> float:
        """Total aggregated supply of all services in the window."""
        return sum(s.dec for s in self.services)

    def request(self, rid: str) -> EnergyRequest:
        for r in self.requests:
            if r.id == rid:
                return r
        raise KeyError(rid)

    def ordered_requests(self) -> list[EnergyRequest]:
        return sorted(self.requests, key=lambda r: (r.arrival_rank, r.id))


def make_scenario(window, services: Iterable[EnergyService] = (),
                  requests: Iterable[EnergyRequest] = ()) -> Scenario:
    """Build a scenario, clipping every entity to the window.

    Clipped services keep their power rate, so capacity is prorated by the
    retained fraction. Entities with no overlap with the window are dropped.
    """
    w0, w1 = window
    if not w0 < w1:
        raise ScenarioError(f"empty window [{w0}, {w1}]")
    kept_services = []
    for s in services:
        a, b = max(s.start, w0), min(s.end, w1)
        if a >= b:
            logger.warning("dropping service %s: outside window", s.id)
            continue
        if (a, b) != (s.start, s.end):
            s = EnergyService(s.id, s.owner_id, a, b, s.energy_in(a, b), s.meta)
        kept_services.append(s)
    kept_requests = []
    for r in requests:
        a, b = max(r.start, w0), min(r.end, w1)
        if a >= b:
            logger.warning("dropping request %s: outside window", r.id)
            continue
        if (a, b) != (r.start, r.end):
            r = EnergyRequest(r.id, a, b, r.re, r.arrival_rank, r.meta)
        kept_requests.append(r)
    return Scenario((w0, w1), tuple(kept_services), tuple(kept_requests))


# ---------------------------------------------------------------------------
# Temporal slicing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Chunk:
    index: int
    start: int
    end: int
    available: float
    active_requests: tuple[str, ...]
    contributing_services: tuple[tuple[str, float], ...]

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class ChunkTimeline:
    boundaries: tuple[int, ...]
    chunks: tuple[Chunk, ...]

    def chunks_of(self, rid: str) -> list[Chunk]:
        return [c for c in self.chunks if rid in c.active_requests]

    def supply_for(self, rid: str) -> float:
        """Energy available anywhere inside the request's interval."""
        return sum(c.available for c in self.chunks_of(rid))


def aggregate(services: Sequence[EnergyService], t0: float, t1: float) -> float:
    """Summed energy of all services inside ``[t0, t1)``."""
    if not t0 < t1:
        raise ValueError(f"empty interval [{t0}, {t1}]")
    return sum(s.energy_in(t0, t1) for s in services)


def slice_timeline(scenario: Scenario) -> ChunkTimeline:
    """Cut the window at every request and service endpoint."""
    w0, w1 = scenario.window
    if not w0 < w1:
        raise ScenarioError(f"empty window [{w0}, {w1}]")
    points = {w0, w1}
    for item in (*scenario.requests, *scenario.services):
        points.add(item.start)
        points.add(item.end)
    bounds = tuple(sorted(points))
    ordered = scenario.ordered_requests()
    chunks = []
    for k, (t0, t1) in enumerate(zip(bounds, bounds[1:])):
        contrib = tuple((s.id, s.energy_in(t0, t1)) for s in scenario.services
                        if s.start < t1 and s.end > t0)
        chunks.append(Chunk(
            index=k,
            start=t0,
            end=t1,
            available=sum(e for _, e in contrib),
            active_requests=tuple(r.id for r in ordered if r.covers(t0, t1)),
            contributing_services=contrib,
        ))
    return ChunkTimeline(bounds, tuple(chunks))


# ---------------------------------------------------------------------------
# Allocation plans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AllocationPlan:
    strategy_name: str
    per_request: Mapping[str, float]
    per_cell: Mapping[tuple[str, int], float]

    @property
    def total(self) -> float:
        return sum(self.per_request.values())

    @classmethod
    def from_cells(cls, name: str, scenario: Scenario, cells: Mapping[tuple[str, int], float]):
        cells = {k: v for k, v in cells.items() if v > 0}
        per_request = {r.id: 0.0 for r in scenario.requests}
        for (rid, _), e in cells.items():
            per_request[rid] += e
        return cls(name, per_request, cells)


def plan_violations(plan: AllocationPlan, scenario: Scenario, timeline: ChunkTimeline,
                    tol: float = TOL) -> list[str]:
    """Every broken feasibility invariant of ``plan``, as readable strings."""
    out = []
    scale = max(1.0, scenario.agg_e, sum(r.re for r in scenario.requests))
    eps = tol * scale
    demand = {r.id: r.re for r in scenario.requests}
    if set(plan.per_request) != set(demand):
        out.append("per_request keys differ from scenario request ids")
    sums: dict[str, float] = {rid: 0.0 for rid in demand}
    outflow = [0.0] * len(timeline.chunks)
    for (rid, k), e in plan.per_cell.items():
        if rid not in demand:
            out.append(f"cell for unknown request {rid!r}")
            continue
        if not 0 <= k < len(timeline.chunks):
            out.append(f"cell ({rid}, {k}) references a missing chunk")
            continue
        if e < -eps:
            out.append(f"negative cell ({rid}, {k}) = {e}")
        if e > eps and rid not in timeline.chunks[k].active_requests:
            out.append(f"request {rid} receives {e:.6g} in chunk {k} where it is inactive")
        sums[rid] += e
        outflow[k] += e
    for rid, al in plan.per_request.items():
        if rid not in demand:
            continue
        if abs(al - sums[rid]) > eps:
            out.append(f"request {rid}: per_request {al} != sum of cells {sums[rid]}")
        if al < -eps or al > demand[rid] + eps:
            out.append(f"request {rid}: allocation {al:.9g} outside [0, {demand[rid]:.9g}]")
    for c in timeline.chunks:
        if outflow[c.index] > c.available + eps:
            out.append(f"chunk {c.index}: outflow {outflow[c.index]:.9g} > available {c.available:.9g}")
    return out


# ---------------------------------------------------------------------------
# Scenario files
# ---------------------------------------------------------------------------

def scenario_to_dict(scenario: Scenario) -> dict:
    services = []
    for s in scenario.services:
        d = {"id": s.id, "owner": s.owner_id, "start": s.start, "end": s.end, "dec": s.dec}
        if s.meta:
            d["meta"] = dict(s.meta)
        services.append(d)
    requests = []
    for r in scenario.requests:
        d = {"id": r.id, "start": r.start, "end": r.end, "re": r.re, "arrival_rank": r.arrival_rank}
        if r.meta:
            d["meta"] = dict(r.meta)
        requests.append(d)
    return {
        "window": {"start": scenario.window[0], "end": scenario.window[1]},
        "services": services,
        "requests": requests,
    }


def save_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2) + "\n"


def _int_field(entry: dict, key: str, what: str) -> int:
    if key not in entry:
        raise ScenarioError(f"{what}: missing field {key!r}")
    v = entry[key]
    if isinstance(v, bool) or not isinstance(v, int):
        if isinstance(v, float) and v.is_integer():
            return int(v)
        raise ScenarioError(f"{what}: field {key!r} must be an integer minute, got {v!r}")
    return v


def _num_field(entry: dict, key: str, what: str) -> float:
    if key not in entry:
        raise ScenarioError(f"{what}: missing field {key!r}")
    v = entry[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{what}: field {key!r} must be a number, got {v!r}")
    return v


def scenario_from_dict(data: Mapping) -> Scenario:
    if not isinstance(data, Mapping):
        raise ScenarioError("scenario must be a JSON object")
    try:
        win = data["window"]
        window = (_int_field(win, "start", "window"), _int_field(win, "end", "window"))
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"window: expected {{start, end}} ({exc})") from None
    services = []
    for k, e in enumerate(data.get("services", [])):
        what = f"service {e.get('id', f'#{k}')!r}" if isinstance(e, Mapping) else f"service #{k}"
        if not isinstance(e, Mapping) or "id" not in e:
            raise ScenarioError(f"{what}: expected an object with an 'id'")
        services.append(EnergyService(
            id=str(e["id"]),
            owner_id=str(e.get("owner", e["id"])),
            start=_int_field(e, "start", what),
            end=_int_field(e, "end", what),
            dec=_num_field(e, "dec", what),
            meta=dict(e.get("meta", {})),
        ))
    requests = []
    for k, e in enumerate(data.get("requests", [])):
        what = f"request {e.get('id', f'#{k}')!r}" if isinstance(e, Mapping) else f"request #{k}"
        if not isinstance(e, Mapping) or "id" not in e:
            raise ScenarioError(f"{what}: expected an object with an 'id'")
        requests.append(EnergyRequest(
            id=str(e["id"]),
            start=_int_field(e, "start", what),
            end=_int_field(e, "end", what),
            re=_num_field(e, "re", what),
            arrival_rank=_int_field(e, "arrival_rank", what) if "arrival_rank" in e else k,
            meta=dict(e.get("meta", {})),
        ))
    return make_scenario(window, services, requests)


def load_scenario(text: str) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed scenario file: {exc}") from None
    return scenario_from_dict(data)


def read_scenario(path) -> Scenario:
    with open(path) as fh:
        return load_scenario(fh.read())


def write_scenario(scenario: Scenario, path) -> None:
    with open(path, "w") as fh:
        fh.write(save_scenario(scenario))
