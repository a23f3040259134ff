"""Allocation strategies: Scenario + ChunkTimeline -> AllocationPlan.

FCFS, P_FCFS and RR are the classic one-request-at-a-time baselines. MAXMIN
water-fills every contested chunk. FACES first serves chunks that hold a single
request, then splits each contested chunk equally among its unmet requests and
discards whatever a capped share leaves over. NFACES keeps the first pass but
serves contested chunks largest-remaining-demand first.

The contention-driven strategies (P_FCFS, MAXMIN, FACES, NFACES) work on
*segments*: maximal runs of consecutive chunks sharing the same active request
set, i.e. the chunks a request-endpoint-only slicing would produce. A
segment-level grant is spread back over its chunks in proportion to each
chunk's supply.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .model import TOL, AllocationPlan, ChunkTimeline, Scenario

DEFAULT_QUANTUM = 10


class StrategyId(str, enum.Enum):
    FCFS = "FCFS"
    P_FCFS = "P_FCFS"
    RR = "RR"
    MAXMIN = "MAXMIN"
    FACES = "FACES"
    NFACES = "NFACES"

    @classmethod
    def parse(cls, name: "str | StrategyId") -> "StrategyId":
        if isinstance(name, cls):
            return name
        key = str(name).strip().upper().replace("-", "_")
        aliases = {"PFCFS": "P_FCFS", "MAX_MIN": "MAXMIN", "ROUND_ROBIN": "RR"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown strategy {name!r} (expected one of {valid})") from None


@dataclass(frozen=True)
class PartialRequest:
    request_id: str
    chunk_index: int
    remaining: float


@dataclass
class _Segment:
    chunk_indices: list[int]
    available: float
    active: tuple[str, ...]


def segments(timeline: ChunkTimeline) -> list[_Segment]:
    """Merge consecutive chunks whose active request sets coincide."""
    out: list[_Segment] = []
    for c in timeline.chunks:
        if out and out[-1].active == c.active_requests:
            out[-1].chunk_indices.append(c.index)
            out[-1].available += c.available
        else:
            out.append(_Segment([c.index], c.available, c.active_requests))
    return out


class _Ledger:
    """Running per-request remaining demand and per-cell grants."""

    def __init__(self, scenario: Scenario, timeline: ChunkTimeline):
        self.scenario = scenario
        self.timeline = timeline
        self.demand = {r.id: float(r.re) for r in scenario.requests}
        self.remaining = dict(self.demand)
        self.cells: dict[tuple[str, int], float] = {}

    def unmet(self, rids: Sequence[str]) -> list[str]:
        return [rid for rid in rids if self.remaining[rid] > TOL * max(1.0, self.demand[rid])]

    def grant_cell(self, rid: str, k: int, amount: float) -> None:
        if amount <= 0:
            return
        self.cells[(rid, k)] = self.cells.get((rid, k), 0.0) + amount
        self.remaining[rid] -= amount

    def grant_segment(self, seg: _Segment, grants: Mapping[str, float]) -> None:
        if seg.available <= 0:
            return
        for rid, amount in grants.items():
            if amount <= 0:
                continue
            for k in seg.chunk_indices:
                share = self.timeline.chunks[k].available / seg.available
                if share > 0:
                    self.cells[(rid, k)] = self.cells.get((rid, k), 0.0) + amount * share
            self.remaining[rid] -= amount

    def plan(self, name: str) -> AllocationPlan:
        return AllocationPlan.from_cells(name, self.scenario, self.cells)


# ---------------------------------------------------------------------------
# Per-chunk division rules
# ---------------------------------------------------------------------------

def water_fill(capacity: float, demands: Sequence[float]) -> list[float]:
    """Max-min fair division of one resource among capped demands."""
    alloc = [0.0] * len(demands)
    left = capacity
    order = sorted(range(len(demands)), key=lambda i: demands[i])
    for pos, i in enumerate(order):
        fair = left / (len(order) - pos)
        alloc[i] = min(demands[i], fair)
        left -= alloc[i]
    return alloc


def equal_split(capacity: float, demands: Sequence[float]) -> list[float]:
    """Equal shares capped at demand; capped surplus is not handed on."""
    if not demands:
        return []
    share = capacity / len(demands)
    return [min(d, share) for d in demands]


def greedy_in_order(capacity: float, demands: Sequence[float]) -> list[float]:
    alloc = []
    left = capacity
    for d in demands:
        take = min(d, left)
        alloc.append(take)
        left -= take
    return alloc


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------

def fcfs(scenario: Scenario, timeline: ChunkTimeline) -> AllocationPlan:
    """Arrival order, each request reserving whole services.

    A reserved service is lost to every later request, including outside the
    reserver's own interval; whatever the reserver cannot absorb is wasted.
    """
    book = _Ledger(scenario, timeline)
    reserved: set[str] = set()
    services = sorted(scenario.services, key=lambda s: (s.start, s.id))
    for req in scenario.ordered_requests():
        in_window = [c for c in timeline.chunks if req.covers(c.start, c.end)]
        for svc in services:
            if not book.unmet([req.id]):
                break
            if svc.id in reserved or svc.end <= req.start or svc.start >= req.end:
                continue
            reserved.add(svc.id)
            for c in in_window:
                part = dict(c.contributing_services).get(svc.id, 0.0)
                book.grant_cell(req.id, c.index, min(part, max(book.remaining[req.id], 0.0)))
    return book.plan(StrategyId.FCFS.value)


def _segment_pass(scenario: Scenario, timeline: ChunkTimeline, name: str,
                  divide: Callable[[float, list[float]], list[float]],
                  single_first: bool, order: Callable[[list[str], _Ledger], list[str]] | None = None):
    book = _Ledger(scenario, timeline)
    segs = segments(timeline)
    if single_first:
        for seg in segs:
            if len(seg.active) == 1:
                rid = seg.active[0]
                book.grant_segment(seg, {rid: min(seg.available, max(book.remaining[rid], 0.0))})
        segs = [seg for seg in segs if len(seg.active) >= 2]
    for seg in segs:
        rids = book.unmet(seg.active)
        if not rids:
            continue
        if order is not None:
            rids = order(rids, book)
        grants = divide(seg.available, [book.remaining[rid] for rid in rids])
        book.grant_segment(seg, dict(zip(rids, grants)))
    return book.plan(name)


def p_fcfs(scenario: Scenario, timeline: ChunkTimeline) -> AllocationPlan:
    """Preemptive FCFS: chunk by chunk, earliest arrival takes first."""
    return _segment_pass(scenario, timeline, StrategyId.P_FCFS.value, greedy_in_order, single_first=False)


def maxmin(scenario: Scenario, timeline: ChunkTimeline) -> AllocationPlan:
    """Time-constrained max-min: water-filling inside every chunk."""
    return _segment_pass(scenario, timeline, StrategyId.MAXMIN.value, water_fill, single_first=False)


def faces(scenario: Scenario, timeline: ChunkTimeline) -> AllocationPlan:
    return _segment_pass(scenario, timeline, StrategyId.FACES.value, equal_split, single_first=True)


def _largest_remaining_first(rids: list[str], book: _Ledger) -> list[str]:
    rank = {r.id: r.arrival_rank for r in book.scenario.requests}
    return sorted(rids, key=lambda rid: (-book.remaining[rid], rank[rid], rid))


def nfaces(scenario: Scenario, timeline: ChunkTimeline) -> AllocationPlan:
    return _segment_pass(scenario, timeline, StrategyId.NFACES.value, greedy_in_order,
                         single_first=True, order=_largest_remaining_first)


def rr(scenario: Scenario, timeline: ChunkTimeline, quantum: int = DEFAULT_QUANTUM) -> AllocationPlan:
    """Round robin over fixed time slots.

    Each slot goes whole to one unmet request active in it, picked by a cursor
    that cycles through arrival order and persists across slots.
    """
    if quantum <= 0:
        raise ValueError(f"quantum must be > 0, got {quantum}")
    book = _Ledger(scenario, timeline)
    order = [r.id for r in scenario.ordered_requests()]
    cursor = 0
    w0, w1 = scenario.window
    for t0 in range(w0, w1, quantum):
        t1 = min(t0 + quantum, w1)
        # (chunk, energy of the chunk falling inside this slot)
        pieces = []
        for c in timeline.chunks:
            a, b = max(c.start, t0), min(c.end, t1)
            if a < b:
                pieces.append((c, c.available * (b - a) / c.length))
        candidates = set(book.unmet([rid for c, _ in pieces for rid in c.active_requests]))
        if not candidates:
            continue
        for step in range(len(order)):
            pos = (cursor + step) % len(order)
            if order[pos] in candidates:
                break
        rid = order[pos]
        cursor = (pos + 1) % len(order)
        for c, energy in pieces:
            if rid in c.active_requests:
                book.grant_cell(rid, c.index, min(energy, max(book.remaining[rid], 0.0)))
    return book.plan(StrategyId.RR.value)


_DISPATCH = {
    StrategyId.FCFS: fcfs,
    StrategyId.P_FCFS: p_fcfs,
    StrategyId.MAXMIN: maxmin,
    StrategyId.FACES: faces,
    StrategyId.NFACES: nfaces,
}


def allocate(strategy: "str | StrategyId", scenario: Scenario, timeline: ChunkTimeline,
             quantum: int = DEFAULT_QUANTUM) -> AllocationPlan:
    sid = StrategyId.parse(strategy)
    if sid is StrategyId.RR:
        return rr(scenario, timeline, quantum)
    return _DISPATCH[sid](scenario, timeline)


ALL_STRATEGIES = tuple(StrategyId)
