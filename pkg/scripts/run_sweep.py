"""Request-count sweep over every strategy; writes CSV and prints the trend checks."""

import argparse
import time
from pathlib import Path

from faces.harness import sweep_rows, write_csv
from faces.strategies import ALL_STRATEGIES
from faces.trends import SWEEP_N, evaluate_trends
from faces.workload import GenConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", help="workload config JSON (defaults to the built-in one)")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/sweep.csv")
    args = ap.parse_args()

    config = GenConfig.from_json(Path(args.config).read_text()) if args.config else GenConfig()
    config = config.replace(seed=args.seed)
    t0 = time.perf_counter()
    rows = sweep_rows(config, ALL_STRATEGIES, SWEEP_N, args.trials, workers=args.jobs)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(write_csv(rows))
    print(f"{len(rows)} rows -> {out} in {time.perf_counter() - t0:.1f}s")
    for name, (ok, detail) in evaluate_trends(rows).items():
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


if __name__ == "__main__":
    main()
