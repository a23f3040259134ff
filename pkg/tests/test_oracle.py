import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from conftest import scenarios
from faces.model import EnergyRequest, EnergyService, make_scenario, plan_violations, slice_timeline
from faces.oracle import (
    InstanceTooLarge,
    brute_force,
    brute_force_max_total,
    grid_maxmin_vector,
    lex_dominates,
    max_utilization,
    maxmin_optimal,
    pareto_front,
    reachable_allocations,
)
from faces.strategies import ALL_STRATEGIES, allocate, water_fill


def tl(sc):
    return slice_timeline(sc)


def two_private_one_shared():
    # A alone on [0,10) with 10 mAh, both on [10,20) with 20 mAh, B alone on [20,30) with 50 mAh
    return make_scenario(
        (0, 30),
        [EnergyService("SA", "P", 0, 10, 10.0), EnergyService("SX", "P", 10, 20, 20.0),
         EnergyService("SB", "P", 20, 30, 50.0)],
        [EnergyRequest("A", 0, 20, 1000.0, 0), EnergyRequest("B", 10, 30, 1000.0, 1)],
    )


# --- max flow ----------------------------------------------------------------

def test_sole_request_takes_all_supply():
    sc = make_scenario((0, 60), [EnergyService("S1", "P", 0, 30, 40.0), EnergyService("S2", "P", 20, 60, 80.0)],
                       [EnergyRequest("R", 0, 60, 500.0, 0)])
    value, _ = max_utilization(sc, tl(sc))
    assert value == pytest.approx(120.0)


def test_disjoint_windows_decompose():
    sc = make_scenario((0, 60), [EnergyService("S", "P", 0, 60, 120.0)],
                       [EnergyRequest("A", 0, 20, 10.0, 0), EnergyRequest("B", 20, 60, 500.0, 1)])
    value, _ = max_utilization(sc, tl(sc))
    assert value == pytest.approx(min(10.0, 40.0) + min(500.0, 80.0))


@given(scenarios())
def test_witness_is_feasible_and_attains_value(sc):
    t = tl(sc)
    value, plan = max_utilization(sc, t)
    assert plan_violations(plan, sc, t) == []
    assert plan.total == pytest.approx(value, rel=1e-9, abs=1e-9)


@settings(max_examples=60)
@given(scenarios(max_services=3, max_requests=3, horizon=12, integer_energy=True))
def test_max_flow_matches_enumeration(sc):
    t = tl(sc)
    try:
        brute = brute_force_max_total(sc, t, max_combinations=10**6)
    except InstanceTooLarge:
        return
    value, _ = max_utilization(sc, t)
    assert value == pytest.approx(brute, abs=1e-9)


@given(scenarios(integer_energy=True))
def test_integer_capacities_give_integer_flow(sc):
    value, _ = max_utilization(sc, tl(sc))
    assert value == pytest.approx(round(value), abs=1e-9)


# --- progressive filling -----------------------------------------------------

def test_private_floors_then_shared_split():
    sc = two_private_one_shared()
    plan = maxmin_optimal(sc, tl(sc))
    # A can reach 30 only by taking the whole shared chunk; B already has 50 privately
    assert plan.per_request == pytest.approx({"A": 30.0, "B": 50.0}, abs=1e-5)


def test_private_floors_match_grid_brute_force():
    sc = two_private_one_shared()
    assert grid_maxmin_vector(sc, tl(sc)) == pytest.approx((30.0, 50.0))


@given(st.floats(0, 500), st.lists(st.floats(1, 300), min_size=1, max_size=5))
def test_single_chunk_equals_water_fill(capacity, demands):
    sc = make_scenario((0, 10), [EnergyService("S", "P", 0, 10, capacity)],
                       [EnergyRequest(f"R{k}", 0, 10, d, k) for k, d in enumerate(demands)])
    plan = maxmin_optimal(sc, tl(sc))
    got = [plan.per_request[f"R{k}"] for k in range(len(demands))]
    assert got == pytest.approx(water_fill(capacity, demands), abs=1e-5)


@settings(max_examples=50)
@given(scenarios(max_services=3, max_requests=3, horizon=10, integer_energy=True, min_requests=1))
def test_maxmin_optimal_is_undominated(sc):
    t = tl(sc)
    try:
        best = grid_maxmin_vector(sc, t, max_combinations=10**6)
    except InstanceTooLarge:
        return
    plan = maxmin_optimal(sc, t)
    got = [plan.per_request[r.id] for r in sc.ordered_requests()]
    assert plan_violations(plan, sc, t, tol=1e-6) == []
    # the continuous optimum is at least the best grid vector
    assert not lex_dominates(best, got, tol=1e-5)


@given(scenarios(max_requests=5), st.sampled_from(ALL_STRATEGIES))
def test_maxmin_optimal_bounds(sc, sid):
    t = tl(sc)
    fair = maxmin_optimal(sc, t)
    optimum, _ = max_utilization(sc, t)
    assert fair.total <= optimum + 1e-6
    plan = allocate(sid, sc, t)
    if sc.requests:
        # smallest absolute allocation: nobody does better at the bottom
        assert min(fair.per_request.values()) >= min(plan.per_request.values()) - 1e-5


def test_round_robin_can_beat_absolute_maxmin_on_fulfillment():
    """Equalizing mAh is not equalizing fulfillment: the minimum-fulfillment bound is not universal."""
    sc = make_scenario((0, 30), [EnergyService("S", "P", 0, 30, 30.0)],
                       [EnergyRequest("BIG", 0, 30, 100.0, 0), EnergyRequest("SMALL", 0, 30, 20.0, 1)])
    t = tl(sc)
    fair = maxmin_optimal(sc, t)
    assert fair.per_request == pytest.approx({"BIG": 15.0, "SMALL": 15.0}, abs=1e-5)
    # slots go BIG, SMALL, BIG: fulfillments 0.2 and 0.5 against 0.15 and 0.75
    plan = allocate("RR", sc, t, quantum=10)
    assert plan.per_request == pytest.approx({"BIG": 20.0, "SMALL": 10.0})
    fulfil = lambda p: min(p.per_request[r.id] / r.re for r in sc.requests)
    assert fulfil(plan) > fulfil(fair) + 0.04


# --- brute force -------------------------------------------------------------

def test_brute_force_single_cell():
    sc = make_scenario((0, 10), [EnergyService("S", "P", 0, 10, 3.0)], [EnergyRequest("R", 0, 10, 2.0, 0)])
    assert brute_force(sc, tl(sc)) == {(2.0, 1.0)}


def test_brute_force_zero_supply():
    sc = make_scenario((0, 10), [], [EnergyRequest("R", 0, 10, 2.0, 0)])
    assert brute_force(sc, tl(sc)) == {(0.0, 0.0)}


def test_brute_force_two_by_two_agrees_with_flow():
    sc = make_scenario((0, 20), [EnergyService("S1", "P", 0, 10, 4.0), EnergyService("S2", "P", 10, 20, 3.0)],
                       [EnergyRequest("A", 0, 20, 5.0, 0), EnergyRequest("B", 5, 20, 4.0, 1)])
    t = tl(sc)
    front = brute_force(sc, t)
    value, _ = max_utilization(sc, t)
    assert max(p[0] for p in front) == pytest.approx(value)


def test_brute_force_guard():
    sc = make_scenario((0, 10), [EnergyService("S", "P", 0, 10, 500.0)],
                       [EnergyRequest(f"R{k}", 0, 10, 500.0, k) for k in range(6)])
    with pytest.raises(InstanceTooLarge):
        reachable_allocations(sc, tl(sc), max_combinations=10**6)


def test_pareto_front():
    assert pareto_front({(3, 0.1), (2, 0.5), (2, 0.4), (1, 0.5), (3, 0.0)}) == {(3, 0.1), (2, 0.5)}


def test_lex_dominates():
    assert lex_dominates((3, 1), (1, 2))
    assert not lex_dominates((1, 2), (2, 1))
    assert not lex_dominates((1, 1), (1, 1))
