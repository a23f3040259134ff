"""Experiment sweeps and invariant fuzzing over generated workloads."""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .metrics import CSV_FIELDS, MetricsReport, entropy_fairness, evaluate
from .model import (
    AllocationPlan,
    Scenario,
    make_scenario,
    plan_violations,
    slice_timeline,
)
from .oracle import max_utilization, maxmin_optimal
from .strategies import ALL_STRATEGIES, DEFAULT_QUANTUM, StrategyId, allocate
from .workload import GenConfig, generate, trial_seed

logger = logging.getLogger(__name__)

SWEEP_METRICS = ("n_services", "agg_e", "total_alloc", "mean_sf", "std_sf", "entropy_fp",
                 "sigma_unfairness", "wastage_pct", "utilization")


def fmt(value) -> str:
    """CSV text for a field: numbers at 9 significant digits."""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def write_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: fmt(row[k]) for k in CSV_FIELDS})
    return buf.getvalue()


def run_all(scenario: Scenario, strategies=ALL_STRATEGIES, quantum: int = DEFAULT_QUANTUM):
    timeline = slice_timeline(scenario)
    out = []
    for sid in strategies:
        plan = allocate(sid, scenario, timeline, quantum)
        out.append((plan, evaluate(plan, scenario)))
    return out


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _TrialJob:
    config: GenConfig
    strategies: tuple[StrategyId, ...]
    n_values: tuple[int, ...]
    trial: int
    quantum: int


def _run_trial(job: _TrialJob) -> list[dict]:
    rows = []
    seed = trial_seed(job.config.seed, job.trial)
    for n in job.n_values:
        scenario = generate(job.config.replace(seed=seed, n_requests=n))
        for _, report in run_all(scenario, job.strategies, job.quantum):
            rows.append(report.csv_row(trial=job.trial))
    return rows


def sweep_rows(config: GenConfig, strategies: Sequence, n_values: Sequence[int], trials: int,
               quantum: int = DEFAULT_QUANTUM, workers: int = 1, per_trial: bool = False) -> list[dict]:
    """Trial-averaged metrics per (strategy, n).

    Trial ``t`` uses the workload seed ``trial_seed(config.seed, t)`` for every
    n and every strategy, so curves share their random draws. Output order is
    fixed by (strategy, n, trial) whatever the worker count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sids = tuple(StrategyId.parse(s) for s in strategies)
    jobs = [_TrialJob(config, sids, tuple(n_values), t, quantum) for t in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_job = list(pool.map(_run_trial, jobs))
    else:
        per_job = [_run_trial(job) for job in jobs]
    by_key: dict[tuple[str, int], list[dict]] = {}
    for rows in per_job:
        for row in rows:
            by_key.setdefault((row["strategy"], row["n_requests"]), []).append(row)
    out = []
    for sid in sids:
        for n in n_values:
            rows = sorted(by_key[(sid.value, n)], key=lambda r: r["trial"])
            if per_trial:
                out.extend(rows)
                continue
            avg = {"strategy": sid.value, "n_requests": n, "trial": "mean"}
            for key in SWEEP_METRICS:
                vals = [float(r[key]) for r in rows if not math.isnan(float(r[key]))]
                avg[key] = math.fsum(vals) / len(vals) if vals else math.nan
            out.append(avg)
    return out


def sweep_csv(*args, **kwargs) -> str:
    return write_csv(sweep_rows(*args, **kwargs))


# ---------------------------------------------------------------------------
# Invariant fuzzing
# ---------------------------------------------------------------------------

PlanHook = Callable[[AllocationPlan, Scenario], AllocationPlan]


def overallocate(plan: AllocationPlan, scenario: Scenario) -> AllocationPlan:
    """Fault injector: pushes the first request one mAh past its demand."""
    if not scenario.requests:
        return plan
    rid = scenario.ordered_requests()[0].id
    cells = dict(plan.per_cell)
    key = next((k for k in cells if k[0] == rid), (rid, 0))
    cells[key] = cells.get(key, 0.0) + scenario.request(rid).re + 1.0
    return AllocationPlan.from_cells(plan.strategy_name, scenario, cells)


def check_scenario(scenario: Scenario, quantum: int = DEFAULT_QUANTUM,
                   hook: PlanHook | None = None) -> list[str]:
    """Run every strategy and oracle on one scenario; return violated invariants."""
    problems = []
    timeline = slice_timeline(scenario)
    w0, w1 = scenario.window
    if timeline.chunks[0].start != w0 or timeline.chunks[-1].end != w1:
        problems.append("chunks do not span the window")
    for a, b in zip(timeline.chunks, timeline.chunks[1:]):
        if a.end != b.start:
            problems.append(f"gap or overlap between chunks {a.index} and {b.index}")
    supply = scenario.agg_e
    sliced = math.fsum(c.available for c in timeline.chunks)
    if abs(sliced - supply) > 1e-9 * max(1.0, supply):
        problems.append(f"slicing does not conserve supply: {sliced!r} vs {supply!r}")
    optimum, witness = max_utilization(scenario, timeline)
    problems += [f"MAXFLOW witness: {v}" for v in plan_violations(witness, scenario, timeline)]
    eps = 1e-9 * max(1.0, supply)
    for sid in ALL_STRATEGIES:
        plan = allocate(sid, scenario, timeline, quantum)
        if hook is not None:
            plan = hook(plan, scenario)
        problems += [f"{sid.value}: {v}" for v in plan_violations(plan, scenario, timeline)]
        if plan.total > optimum + eps:
            problems.append(f"{sid.value}: total {plan.total:.9g} exceeds max-flow optimum {optimum:.9g}")
        report = evaluate(plan, scenario)
        problems += [f"{sid.value}: {v}" for v in report_violations(report)]
    if len(scenario.requests) <= 12:
        fair = maxmin_optimal(scenario, timeline)
        problems += [f"MAXMIN_OPT: {v}" for v in plan_violations(fair, scenario, timeline, tol=1e-6)]
        if fair.total > optimum + eps:
            problems.append("MAXMIN_OPT total exceeds max-flow optimum")
    return problems


def report_violations(report: MetricsReport) -> list[str]:
    out = []
    if report.agg_e > 0 and abs(report.utilization + report.wastage_pct - 1) > 1e-9:
        out.append("utilization + wastage_pct != 1")
    for rid, sf in report.satisfaction.items():
        if not -1e-12 <= sf <= 1 + 1e-12:
            out.append(f"satisfaction of {rid} = {sf} outside [0, 1]")
    boundary = all(sf in (0.0, 1.0) for sf in report.satisfaction.values())
    if boundary != (entropy_fairness(report.satisfaction.values()) == 0.0):
        out.append("entropy is zero exactly when all satisfactions are 0 or 1: violated")
    return out


def minimize(scenario: Scenario, failing: Callable[[Scenario], bool]) -> Scenario:
    """Greedy one-at-a-time removal of services and requests while ``failing`` holds."""
    current = scenario
    changed = True
    while changed:
        changed = False
        for kind in ("requests", "services"):
            items = getattr(current, kind)
            for k in range(len(items)):
                rest = items[:k] + items[k + 1:]
                kwargs = {"services": current.services, "requests": current.requests, kind: rest}
                candidate = make_scenario(current.window, **kwargs)
                if failing(candidate):
                    current = candidate
                    changed = True
                    break
            if changed:
                break
    return current


@dataclass
class VerifyResult:
    trials_run: int
    failure: list[str]
    repro: Scenario | None


def verify(config: GenConfig, trials: int, seed: int | None = None, quantum: int = DEFAULT_QUANTUM,
           hook: PlanHook | None = None, max_requests: int = 30) -> VerifyResult:
    """Fuzz ``trials`` generated scenarios; stop at the first violation.

    Each trial draws its request count uniformly from ``[0, max_requests]``
    unless the config pins one.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    base = config.seed if seed is None else seed
    for t in range(trials):
        s = trial_seed(base, t)
        n = config.n_requests
        if n is None:
            n = s % (max_requests + 1)
        scenario = generate(config.replace(seed=s, n_requests=n))
        problems = check_scenario(scenario, quantum, hook)
        if problems:
            logger.info("trial %d failed: %s", t, problems[0])
            repro = minimize(scenario, lambda sc: bool(check_scenario(sc, quantum, hook)))
            return VerifyResult(t + 1, check_scenario(repro, quantum, hook), repro)
    return VerifyResult(trials, [], None)
