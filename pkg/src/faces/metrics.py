"""Per-plan quality measures: satisfaction, entropy fairness, wastage, utilization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .model import TOL, AllocationPlan, Scenario

CSV_FIELDS = (
    "strategy", "n_requests", "trial", "n_services", "agg_e", "total_alloc", "mean_sf",
    "std_sf", "entropy_fp", "sigma_unfairness", "wastage_pct", "utilization",
)


def fulfillment(plan: AllocationPlan, scenario: Scenario) -> dict[str, float]:
    """Allocated over required energy, per request."""
    return {r.id: min(plan.per_request.get(r.id, 0.0) / r.re, 1.0) for r in scenario.requests}


def satisfaction(plan: AllocationPlan, scenario: Scenario) -> dict[str, float]:
    """Fulfillment scaled by the market-wide share of supply that was consumed.

    A request given at least its demand scores 1.
    """
    supply = scenario.agg_e
    total = sum(plan.per_request.get(r.id, 0.0) for r in scenario.requests)
    out = {}
    for r in scenario.requests:
        al = plan.per_request.get(r.id, 0.0)
        if supply <= 0:
            out[r.id] = 0.0
        elif al <= r.re + TOL * max(1.0, r.re):
            out[r.id] = min(al / r.re, 1.0) * min(total / supply, 1.0)
        else:
            out[r.id] = 1.0
    return out


def entropy_fairness(satisfactions) -> float:
    """``-sum(sf * log2 sf)`` over raw scores, with 0 log 0 = 0. Lower is fairer."""
    fp = 0.0
    for sf in satisfactions:
        if sf < 0 or sf > 1 + TOL:
            raise ValueError(f"satisfaction {sf} outside [0, 1]")
        if 0 < sf < 1:
            fp -= sf * math.log2(sf)
    return fp


def wastage(plan: AllocationPlan, scenario: Scenario) -> tuple[float, float]:
    """(unallocated mAh, unallocated fraction of supply)."""
    supply = scenario.agg_e
    lost = supply - plan.total
    return lost, (lost / supply if supply > 0 else 0.0)


def utilization(plan: AllocationPlan, scenario: Scenario) -> float:
    supply = scenario.agg_e
    return plan.total / supply if supply > 0 else 0.0


def sigma_of_percentages(percentages) -> float:
    """Population standard deviation: {100, 0, 100, 100} gives 43.30, not the sample 50.0."""
    values = np.asarray(list(percentages), dtype=float)
    if values.size == 0:
        raise ValueError("standard deviation of zero requests is undefined")
    return float(values.std())


def sigma_unfairness(plan: AllocationPlan, scenario: Scenario) -> float:
    return sigma_of_percentages(100.0 * f for f in fulfillment(plan, scenario).values())


@dataclass(frozen=True)
class MetricsReport:
    strategy: str
    satisfaction: Mapping[str, float]
    fulfillment: Mapping[str, float]
    mean_sf: float
    std_sf: float
    entropy_fp: float
    sigma_unfairness: float
    wastage_abs: float
    wastage_pct: float
    utilization: float
    agg_e: float
    total_alloc: float
    n_requests: int
    n_services: int

    def csv_row(self, trial="0") -> dict:
        return {
            "strategy": self.strategy,
            "n_requests": self.n_requests,
            "trial": trial,
            "n_services": self.n_services,
            "agg_e": self.agg_e,
            "total_alloc": self.total_alloc,
            "mean_sf": self.mean_sf,
            "std_sf": self.std_sf,
            "entropy_fp": self.entropy_fp,
            "sigma_unfairness": self.sigma_unfairness,
            "wastage_pct": self.wastage_pct,
            "utilization": self.utilization,
        }


def evaluate(plan: AllocationPlan, scenario: Scenario) -> MetricsReport:
    sf = satisfaction(plan, scenario)
    ful = fulfillment(plan, scenario)
    values = np.array(list(sf.values()), dtype=float)
    lost, lost_pct = wastage(plan, scenario)
    return MetricsReport(
        strategy=plan.strategy_name,
        satisfaction=sf,
        fulfillment=ful,
        mean_sf=float(values.mean()) if values.size else 0.0,
        std_sf=float(values.std()) if values.size else 0.0,
        entropy_fp=entropy_fairness(values),
        sigma_unfairness=sigma_unfairness(plan, scenario) if scenario.requests else math.nan,
        wastage_abs=lost,
        wastage_pct=lost_pct,
        utilization=utilization(plan, scenario),
        agg_e=scenario.agg_e,
        total_alloc=plan.total,
        n_requests=len(scenario.requests),
        n_services=len(scenario.services),
    )
