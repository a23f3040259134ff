"""Exact reference solvers used to bound and validate the heuristics.

The allocation problem is a bipartite transport: source -> chunk (capacity =
chunk supply) -> request (uncapacitated, only where the request is active) ->
sink (capacity = demand). Maximum flow gives the least possible wastage;
progressive filling over the same network gives the lexicographically max-min
allocation of energy.
"""

from __future__ import annotations

import math
from typing import Mapping

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from .model import TOL, AllocationPlan, ChunkTimeline, Scenario

SOURCE, SINK = "__source__", "__sink__"
MAX_COMBINATIONS = 10**7


class InstanceTooLarge(RuntimeError):
    pass


def flow_network(scenario: Scenario, timeline: ChunkTimeline,
                 sink_caps: Mapping[str, float] | None = None) -> nx.DiGraph:
    """Chunk/request bipartite graph. ``sink_caps`` overrides request demands."""
    g = nx.DiGraph()
    g.add_node(SOURCE)
    g.add_node(SINK)
    caps = {r.id: r.re for r in scenario.requests} if sink_caps is None else sink_caps
    for r in scenario.requests:
        g.add_edge(("r", r.id), SINK, capacity=float(caps[r.id]))
    for c in timeline.chunks:
        if c.available <= 0 or not c.active_requests:
            continue
        g.add_edge(SOURCE, ("c", c.index), capacity=float(c.available))
        for rid in c.active_requests:
            # no capacity attribute: networkx treats the edge as unbounded
            g.add_edge(("c", c.index), ("r", rid))
    return g


def _solve(scenario, timeline, sink_caps=None):
    g = flow_network(scenario, timeline, sink_caps)
    value, flow = nx.maximum_flow(g, SOURCE, SINK, flow_func=edmonds_karp)
    cells = {}
    for node, out in flow.items():
        if isinstance(node, tuple) and node[0] == "c":
            for dst, f in out.items():
                if f > 0:
                    cells[(dst[1], node[1])] = f
    return value, cells


def max_utilization(scenario: Scenario, timeline: ChunkTimeline) -> tuple[float, AllocationPlan]:
    """Largest total energy any feasible plan can deliver, with a witness plan."""
    value, cells = _solve(scenario, timeline)
    return value, AllocationPlan.from_cells("MAXFLOW", scenario, cells)


def _feasible(scenario, timeline, floors: Mapping[str, float]) -> bool:
    need = sum(floors.values())
    if need <= 0:
        return True
    value, _ = _solve(scenario, timeline, floors)
    return value >= need - TOL * max(1.0, need)


def maxmin_optimal(scenario: Scenario, timeline: ChunkTimeline, tol: float = 1e-6) -> AllocationPlan:
    """Progressive filling: the lexicographically max-min feasible allocation.

    Raises a common floor for every unfrozen request by bisection on max-flow
    feasibility; requests that reach their demand, or cannot rise past the
    floor while the others hold it, are frozen at the floor.
    """
    demand = {r.id: float(r.re) for r in scenario.requests}
    frozen: dict[str, float] = {}
    # a request with no supply in its window can never rise
    for rid in demand:
        if timeline.supply_for(rid) <= 0:
            frozen[rid] = 0.0
    lo = 0.0
    while len(frozen) < len(demand):
        active = [rid for rid in demand if rid not in frozen]

        def floors_at(level, bump=None, delta=0.0):
            f = dict(frozen)
            for rid in active:
                f[rid] = min(level + (delta if rid == bump else 0.0), demand[rid])
            return f

        hi = max(demand[rid] for rid in active)
        if _feasible(scenario, timeline, floors_at(hi)):
            lo = hi
        else:
            while hi - lo > tol * 1e-3:
                mid = (lo + hi) / 2
                if _feasible(scenario, timeline, floors_at(mid)):
                    lo = mid
                else:
                    hi = mid
        newly = []
        for rid in active:
            if demand[rid] <= lo + tol:
                newly.append(rid)
            elif not _feasible(scenario, timeline, floors_at(lo, rid, tol)):
                newly.append(rid)
        if not newly:
            # bisection and bump disagree only through rounding; stop here
            newly = active
        for rid in newly:
            frozen[rid] = min(lo, demand[rid])
    value, cells = _solve(scenario, timeline, frozen)
    return AllocationPlan.from_cells("MAXMIN_OPT", scenario, cells)


# ---------------------------------------------------------------------------
# Grid enumeration
# ---------------------------------------------------------------------------

def _compositions(units: int, slots: int):
    """All ways to place at most ``units`` indistinguishable units into ``slots`` slots."""
    if slots == 0:
        yield ()
        return
    for first in range(units + 1):
        for rest in _compositions(units - first, slots - 1):
            yield (first,) + rest


def _n_compositions(units: int, slots: int) -> int:
    return math.comb(units + slots, slots)


def reachable_allocations(scenario: Scenario, timeline: ChunkTimeline, grid: float = 1.0,
                          max_combinations: int = MAX_COMBINATIONS) -> set[tuple[int, ...]]:
    """Every per-request total (in grid units) some grid-feasible plan achieves.

    Requests are indexed in arrival order. Raises ``InstanceTooLarge`` when the
    raw product of per-chunk choices exceeds ``max_combinations``.
    """
    if grid <= 0:
        raise ValueError("grid step must be positive")
    order = [r.id for r in scenario.ordered_requests()]
    pos = {rid: k for k, rid in enumerate(order)}
    caps = [int(math.floor(scenario.request(rid).re / grid + TOL)) for rid in order]
    chunks = [c for c in timeline.chunks if c.active_requests and c.available > 0]
    combos = 1
    for c in chunks:
        combos *= _n_compositions(int(math.floor(c.available / grid + TOL)), len(c.active_requests))
        if combos > max_combinations:
            raise InstanceTooLarge(f"more than {max_combinations} grid combinations")
    reach = {tuple([0] * len(order))}
    for c in chunks:
        units = int(math.floor(c.available / grid + TOL))
        slots = [pos[rid] for rid in c.active_requests]
        options = list(_compositions(units, len(slots)))
        nxt = set()
        for vec in reach:
            for opt in options:
                new = list(vec)
                ok = True
                for slot, amount in zip(slots, opt):
                    new[slot] += amount
                    if new[slot] > caps[slot]:
                        ok = False
                        break
                if ok:
                    nxt.add(tuple(new))
        reach = nxt
    return reach


def brute_force(scenario: Scenario, timeline: ChunkTimeline, grid: float = 1.0,
                max_combinations: int = MAX_COMBINATIONS) -> set[tuple[float, float]]:
    """Pareto frontier over (total allocated, minimum fulfillment) on a grid."""
    order = scenario.ordered_requests()
    points = set()
    for vec in reachable_allocations(scenario, timeline, grid, max_combinations):
        total = sum(vec) * grid
        min_ful = min((v * grid / r.re for v, r in zip(vec, order)), default=0.0)
        points.add((total, min_ful))
    return pareto_front(points)


def pareto_front(points) -> set[tuple[float, float]]:
    pts = sorted(points, key=lambda p: (-p[0], -p[1]))
    front = set()
    best_second = -math.inf
    for p in pts:
        if p[1] > best_second:
            front.add(p)
            best_second = p[1]
    return front


def lex_dominates(a, b, tol: float = 0.0) -> bool:
    """True when sorted ``a`` is lexicographically larger than sorted ``b`` by more than ``tol``."""
    for x, y in zip(sorted(a), sorted(b)):
        if x > y + tol:
            return True
        if x < y - tol:
            return False
    return False


def grid_maxmin_vector(scenario: Scenario, timeline: ChunkTimeline, grid: float = 1.0,
                       max_combinations: int = MAX_COMBINATIONS) -> tuple[float, ...]:
    """Lexicographically max-min per-request vector among grid-feasible plans."""
    reach = reachable_allocations(scenario, timeline, grid, max_combinations)
    best = max(reach, key=lambda v: sorted(v))
    return tuple(v * grid for v in best)


def brute_force_max_total(scenario: Scenario, timeline: ChunkTimeline, grid: float = 1.0,
                          max_combinations: int = MAX_COMBINATIONS) -> float:
    reach = reachable_allocations(scenario, timeline, grid, max_combinations)
    return max(sum(v) for v in reach) * grid


__all__ = [
    "InstanceTooLarge", "MAX_COMBINATIONS", "brute_force", "brute_force_max_total",
    "flow_network", "grid_maxmin_vector", "lex_dominates", "max_utilization",
    "maxmin_optimal", "pareto_front", "reachable_allocations",
]
