"""``faces`` command line: run, sweep, verify, generate, oracle.

Exit codes: 0 success, 1 runtime failure (I/O, bad scenario, invariant
violation), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import harness
from .metrics import evaluate
from .model import ScenarioError, read_scenario, save_scenario, slice_timeline, write_scenario
from .oracle import InstanceTooLarge, brute_force, max_utilization, maxmin_optimal
from .strategies import ALL_STRATEGIES, DEFAULT_QUANTUM, StrategyId
from .trends import SWEEP_N
from .workload import GenConfig, generate

logger = logging.getLogger("faces")

DEFAULT_TRIALS = 20
DEFAULT_VERIFY_TRIALS = 100


class UsageError(Exception):
    pass


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _n_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.replace(" ", "").split(",") if part)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError("request counts must be non-negative integers")
    return values


def _strategies(args) -> tuple[StrategyId, ...]:
    if args.all or not args.strategy:
        return ALL_STRATEGIES
    try:
        return tuple(StrategyId.parse(s) for s in args.strategy)
    except ValueError as exc:
        raise UsageError(str(exc))


def _config(args) -> GenConfig:
    config = GenConfig()
    if args.config:
        config = GenConfig.from_json(Path(args.config).read_text())
    if getattr(args, "seed", None) is not None:
        config = config.replace(seed=args.seed)
    return config


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
        logger.info("wrote %s", out)


# --- subcommands -------------------------------------------------------------

def cmd_run(args) -> int:
    scenario = read_scenario(args.scenario)
    strategies = _strategies(args)
    results = harness.run_all(scenario, strategies, args.quantum)
    rids = [r.id for r in scenario.ordered_requests()]
    header = ["strategy"] + rids + ["wastage%", "sigma", "mean_sf", "entropy"]
    lines = [header]
    for plan, rep in results:
        lines.append([plan.strategy_name]
                     + [f"{100 * rep.fulfillment[rid]:.0f}" for rid in rids]
                     + [f"{100 * rep.wastage_pct:.2f}", f"{rep.sigma_unfairness:.2f}",
                        f"{rep.mean_sf:.4f}", f"{rep.entropy_fp:.4f}"])
    widths = [max(len(row[k]) for row in lines) for k in range(len(header))]
    for row in lines:
        print("  ".join(cell.rjust(w) if k else cell.ljust(w) for k, (cell, w) in enumerate(zip(row, widths))))
    if args.out:
        Path(args.out).write_text(harness.write_csv([rep.csv_row(trial=0) for _, rep in results]))
    if args.plan_out:
        dump = {plan.strategy_name: {
            "per_request": plan.per_request,
            "per_cell": [{"request": rid, "chunk": k, "energy": e} for (rid, k), e in sorted(plan.per_cell.items())],
        } for plan, _ in results}
        Path(args.plan_out).write_text(json.dumps(dump, indent=2) + "\n")
    return 0


def cmd_sweep(args) -> int:
    config = _config(args)
    text = harness.sweep_csv(config, _strategies(args), args.n_requests, args.trials,
                             quantum=args.quantum, workers=args.jobs, per_trial=args.per_trial)
    _write(text, args.out)
    return 0


def cmd_verify(args) -> int:
    config = _config(args)
    hook = harness.overallocate if args.inject_overalloc else None
    result = harness.verify(config, args.trials, quantum=args.quantum, hook=hook)
    if not result.failure:
        print(f"ok: {result.trials_run} scenarios, no violations")
        return 0
    write_scenario(result.repro, args.out)
    print(f"violation in trial {result.trials_run}: {result.failure[0]}", file=sys.stderr)
    for extra in result.failure[1:5]:
        print(f"  also: {extra}", file=sys.stderr)
    print(f"minimized reproduction written to {args.out}", file=sys.stderr)
    return 1


def cmd_generate(args) -> int:
    config = _config(args)
    if args.n_requests is not None:
        config = config.replace(n_requests=args.n_requests)
    if args.n_services is not None:
        config = config.replace(n_services=args.n_services)
    _write(save_scenario(generate(config)), args.out)
    return 0


def cmd_oracle(args) -> int:
    scenario = read_scenario(args.scenario)
    timeline = slice_timeline(scenario)
    optimum, witness = max_utilization(scenario, timeline)
    fair = maxmin_optimal(scenario, timeline)
    supply = scenario.agg_e
    print(f"supply      {supply:.6g} mAh")
    print(f"max-flow    {optimum:.6g} mAh (utilization {optimum / supply if supply else 0.0:.4f})")
    print("max-min fair allocation:")
    for r in scenario.ordered_requests():
        print(f"  {r.id:>8}  {fair.per_request[r.id]:10.4f} / {r.re:.4g}")
    rep = evaluate(fair, scenario)
    print(f"max-min fair utilization {rep.utilization:.4f}, entropy {rep.entropy_fp:.4f}")
    if args.grid:
        try:
            front = brute_force(scenario, timeline, args.grid)
        except InstanceTooLarge as exc:
            print(f"brute force skipped: {exc}", file=sys.stderr)
            return 1
        print("pareto front (total, min fulfillment):")
        for total, ful in sorted(front, reverse=True):
            print(f"  {total:.6g}  {ful:.4f}")
    return 0


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="faces", description="Energy-sharing allocation strategies and experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def strategy_opts(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--strategy", action="append", metavar="NAME",
                       help="strategy to run (repeatable); one of " + ", ".join(s.value for s in ALL_STRATEGIES))
        g.add_argument("--all", action="store_true", help="every strategy (the default)")
        sp.add_argument("--quantum", type=_positive, default=DEFAULT_QUANTUM, metavar="MIN",
                        help="RR slot length in minutes")

    def config_opts(sp):
        sp.add_argument("--config", metavar="PATH", help="workload config (JSON)")
        sp.add_argument("--seed", type=_u64, metavar="U64", help="override the config seed")

    run = sub.add_parser("run", help="run strategies on a scenario file")
    run.add_argument("--scenario", required=True, metavar="PATH")
    strategy_opts(run)
    run.add_argument("--out", metavar="PATH", help="also write metrics CSV here")
    run.add_argument("--plan-out", metavar="PATH", help="write allocation plans as JSON")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="trial-averaged metrics over request counts")
    config_opts(sweep)
    strategy_opts(sweep)
    sweep.add_argument("--n-requests", type=_n_list, default=SWEEP_N, metavar="LIST")
    sweep.add_argument("--trials", type=_positive, default=DEFAULT_TRIALS, metavar="K")
    sweep.add_argument("--jobs", type=_positive, default=1, metavar="J", help="worker processes")
    sweep.add_argument("--per-trial", action="store_true", help="one row per trial instead of averages")
    sweep.add_argument("--out", metavar="PATH", help="CSV destination (default stdout)")
    sweep.set_defaults(func=cmd_sweep)

    verify = sub.add_parser("verify", help="fuzz generated scenarios against invariants and oracles")
    config_opts(verify)
    verify.add_argument("--trials", type=_positive, default=DEFAULT_VERIFY_TRIALS, metavar="K")
    verify.add_argument("--quantum", type=_positive, default=DEFAULT_QUANTUM, metavar="MIN")
    verify.add_argument("--out", default="verify_repro.json", metavar="PATH",
                        help="where to write a minimized failing scenario")
    verify.add_argument("--inject-overalloc", action="store_true", help=argparse.SUPPRESS)
    verify.set_defaults(func=cmd_verify)

    gen = sub.add_parser("generate", help="write one generated scenario")
    config_opts(gen)
    gen.add_argument("--n-requests", type=int, metavar="N")
    gen.add_argument("--n-services", type=int, metavar="N")
    gen.add_argument("--out", metavar="PATH", help="scenario destination (default stdout)")
    gen.set_defaults(func=cmd_generate)

    oracle = sub.add_parser("oracle", help="exact optimum and max-min fair allocation for a scenario")
    oracle.add_argument("--scenario", required=True, metavar="PATH")
    oracle.add_argument("--grid", type=float, metavar="MAH", help="also enumerate plans on this grid")
    oracle.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (OSError, ScenarioError, ValueError) as exc:
        print(f"faces: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
