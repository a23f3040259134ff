"""Four-panel plot of a sweep CSV (needs the ``plot`` extra)."""

import argparse
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

PANELS = (
    ("mean_sf", "mean satisfaction"),
    ("std_sf", "std of satisfaction"),
    ("entropy_fp", "entropy (lower is fairer)"),
    ("utilization", "utilization"),
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", nargs="?", default="results/sweep.csv")
    ap.add_argument("--out", default="results/sweep.png")
    args = ap.parse_args()

    with open(args.csv) as fh:
        rows = [r for r in csv.DictReader(fh) if r["trial"] == "mean"]
    strategies = list(dict.fromkeys(r["strategy"] for r in rows))
    fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
    for ax, (key, title) in zip(axes.flat, PANELS):
        for s in strategies:
            pts = sorted((int(r["n_requests"]), float(r[key])) for r in rows if r["strategy"] == s)
            ax.plot(*zip(*pts), marker="o", label=s)
        ax.set_title(title)
        ax.set_xlabel("requests")
    axes[0, 0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
