"""Fairness-aware provisioning of crowdsourced energy services."""

from .metrics import MetricsReport, evaluate
from .model import (
    AllocationPlan,
    Chunk,
    ChunkTimeline,
    EnergyRequest,
    EnergyService,
    Scenario,
    ScenarioError,
    aggregate,
    load_scenario,
    make_scenario,
    plan_violations,
    read_scenario,
    save_scenario,
    slice_timeline,
)
from .strategies import ALL_STRATEGIES, StrategyId, allocate
from .workload import GenConfig, generate

__all__ = [
    "ALL_STRATEGIES", "AllocationPlan", "Chunk", "ChunkTimeline", "EnergyRequest",
    "EnergyService", "GenConfig", "MetricsReport", "Scenario", "ScenarioError",
    "StrategyId", "aggregate", "allocate", "evaluate", "generate", "load_scenario",
    "make_scenario", "plan_violations", "read_scenario", "save_scenario", "slice_timeline",
]
