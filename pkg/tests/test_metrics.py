import math

import pytest
from hypothesis import given
import hypothesis.strategies as st

from conftest import scenarios
from faces.metrics import (
    CSV_FIELDS,
    entropy_fairness,
    evaluate,
    satisfaction,
    sigma_of_percentages,
    sigma_unfairness,
    utilization,
    wastage,
)
from faces.model import AllocationPlan, EnergyRequest, EnergyService, make_scenario, slice_timeline
from faces.strategies import ALL_STRATEGIES, allocate


def plan_for(scenario, per_request):
    """Plan placing each request's energy in its first active chunk (metrics only read totals)."""
    tl = slice_timeline(scenario)
    cells = {}
    for rid, e in per_request.items():
        k = next(c.index for c in tl.chunks if rid in c.active_requests)
        cells[(rid, k)] = e
    return AllocationPlan.from_cells("TEST", scenario, cells)


# --- satisfaction ------------------------------------------------------------

def test_satisfaction_fully_met_and_consumed():
    sc = make_scenario((0, 10), [EnergyService("S", "P", 0, 10, 30.0)],
                       [EnergyRequest("A", 0, 10, 10.0, 0), EnergyRequest("B", 0, 10, 20.0, 1)])
    assert satisfaction(plan_for(sc, {"A": 10.0, "B": 20.0}), sc) == pytest.approx({"A": 1.0, "B": 1.0})


def test_satisfaction_zero_allocation():
    sc = make_scenario((0, 10), [EnergyService("S", "P", 0, 10, 30.0)], [EnergyRequest("A", 0, 10, 10.0, 0)])
    assert satisfaction(plan_for(sc, {}), sc) == {"A": 0.0}


def test_satisfaction_formula():
    # supply 1000, total allocated 500, the request got 80% of its demand
    sc = make_scenario((0, 10), [EnergyService("S", "P", 0, 10, 1000.0)],
                       [EnergyRequest("A", 0, 10, 500.0, 0), EnergyRequest("B", 0, 10, 500.0, 1)])
    sf = satisfaction(plan_for(sc, {"A": 400.0, "B": 100.0}), sc)
    assert sf["A"] == pytest.approx(0.8 * 0.5)
    assert sf["B"] == pytest.approx(0.2 * 0.5)


def test_satisfaction_without_supply():
    sc = make_scenario((0, 10), [], [EnergyRequest("A", 0, 10, 10.0, 0)])
    assert satisfaction(plan_for(sc, {}), sc) == {"A": 0.0}


# --- entropy -----------------------------------------------------------------

@pytest.mark.parametrize("values, expected", [
    ([0.0, 1.0, 1.0, 0.0], 0.0),
    ([0.5], 0.5),
    ([0.5, 0.5, 0.25], 1.5),
    ([], 0.0),
])
def test_entropy_examples(values, expected):
    assert entropy_fairness(values) == pytest.approx(expected)


def test_entropy_rejects_out_of_range():
    with pytest.raises(ValueError):
        entropy_fairness([1.5])


@given(st.lists(st.floats(0, 1), max_size=20))
def test_entropy_zero_iff_boundary(values):
    fp = entropy_fairness(values)
    assert fp >= 0
    assert (fp == 0.0) == all(v in (0.0, 1.0) for v in values)


@given(st.lists(st.floats(0, 1), max_size=20))
def test_entropy_matches_direct_sum(values):
    direct = -math.fsum(v * math.log2(v) for v in values if 0 < v < 1)
    assert entropy_fairness(values) == pytest.approx(direct, abs=1e-12)


# --- sigma -------------------------------------------------------------------

@pytest.mark.parametrize("percentages, expected", [
    ([100, 0, 100, 100], 43.30),
    ([100, 50, 67, 100], 21.60),
    ([70, 70, 70], 0.0),
])
def test_sigma_convention(percentages, expected):
    assert sigma_of_percentages(percentages) == pytest.approx(expected, abs=0.05)


def test_sigma_is_population_not_sample():
    # the sample estimator gives 50.0 on this vector
    assert sigma_of_percentages([100, 0, 100, 100]) == pytest.approx(math.sqrt(1875))


def test_sigma_undefined_without_requests():
    sc = make_scenario((0, 10), [EnergyService("S", "P", 0, 10, 5.0)])
    with pytest.raises(ValueError):
        sigma_unfairness(plan_for(sc, {}), sc)
    assert math.isnan(evaluate(plan_for(sc, {}), sc).sigma_unfairness)


# --- wastage / utilization ---------------------------------------------------

def test_no_requests_wastes_everything():
    sc = make_scenario((0, 10), [EnergyService("S", "P", 0, 10, 5.0)])
    plan = plan_for(sc, {})
    assert wastage(plan, sc) == (5.0, 1.0)
    assert utilization(plan, sc) == 0.0


def test_full_use_wastes_nothing():
    sc = make_scenario((0, 10), [EnergyService("S", "P", 0, 10, 30.0)],
                       [EnergyRequest("A", 0, 10, 10.0, 0), EnergyRequest("B", 0, 10, 20.0, 1)])
    plan = plan_for(sc, {"A": 10.0, "B": 20.0})
    assert wastage(plan, sc)[1] == pytest.approx(0.0)
    assert utilization(plan, sc) == pytest.approx(1.0)


def test_no_supply_conventions():
    sc = make_scenario((0, 10), [], [EnergyRequest("A", 0, 10, 10.0, 0)])
    plan = plan_for(sc, {})
    assert wastage(plan, sc) == (0.0, 0.0)
    assert utilization(plan, sc) == 0.0


@given(scenarios(), st.sampled_from(ALL_STRATEGIES))
def test_report_identities(sc, sid):
    rep = evaluate(allocate(sid, sc, slice_timeline(sc)), sc)
    if sc.agg_e > 0:
        assert rep.utilization + rep.wastage_pct == pytest.approx(1.0, abs=1e-9)
    assert all(0.0 <= v <= 1.0 for v in rep.satisfaction.values())
    assert rep.wastage_abs == pytest.approx(rep.agg_e - rep.total_alloc)


@given(scenarios(min_requests=1), st.sampled_from(ALL_STRATEGIES), st.floats(0.01, 100))
def test_scale_invariance(sc, sid, k):
    scaled = make_scenario(
        sc.window,
        [EnergyService(s.id, s.owner_id, s.start, s.end, s.dec * k) for s in sc.services],
        [EnergyRequest(r.id, r.start, r.end, r.re * k, r.arrival_rank) for r in sc.requests],
    )
    plan = allocate(sid, sc, slice_timeline(sc))
    scaled_plan = AllocationPlan.from_cells("X", scaled, {key: e * k for key, e in plan.per_cell.items()})
    a, b = evaluate(plan, sc), evaluate(scaled_plan, scaled)
    assert b.satisfaction == pytest.approx(a.satisfaction, rel=1e-6, abs=1e-9)
    assert b.entropy_fp == pytest.approx(a.entropy_fp, rel=1e-6, abs=1e-6)
    assert b.sigma_unfairness == pytest.approx(a.sigma_unfairness, rel=1e-6, abs=1e-6)
    assert b.wastage_pct == pytest.approx(a.wastage_pct, rel=1e-6, abs=1e-9)
    assert b.utilization == pytest.approx(a.utilization, rel=1e-6, abs=1e-9)
    assert b.wastage_abs == pytest.approx(k * a.wastage_abs, rel=1e-6, abs=1e-6 * k)


def test_csv_row_fields():
    sc = make_scenario((0, 10), [EnergyService("S", "P", 0, 10, 5.0)], [EnergyRequest("A", 0, 10, 10.0, 0)])
    row = evaluate(plan_for(sc, {"A": 5.0}), sc).csv_row(trial=3)
    assert tuple(row) == CSV_FIELDS
    assert row["trial"] == 3 and row["utilization"] == 1.0
