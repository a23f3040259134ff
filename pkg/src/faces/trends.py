"""Qualitative sweep trends (satisfaction, dispersion, entropy, utilization).

Each check takes trial-averaged sweep rows and returns ``(passed, detail)``.
Thresholds are fixed here, not tuned per run.
"""

from __future__ import annotations

from typing import Sequence

SWEEP_N = (1, 5, 10, 15, 20, 25, 30)

ONE_AT_A_TIME = ("FCFS", "P_FCFS", "RR", "FACES")
STD_SETTLE = 0.02          # largest allowed drop of std_sf over the last sweep step
FCFS_ENTROPY_SHARE = 0.25  # "near zero": at most this share of the smallest other entropy
UTIL_TIE = 0.02            # NFACES vs MAXMIN utilization gap
SLACK = 1e-9               # float slack on orderings


def curves(rows: Sequence[dict], metric: str) -> dict[str, dict[int, float]]:
    out: dict[str, dict[int, float]] = {}
    for r in rows:
        out.setdefault(r["strategy"], {})[int(r["n_requests"])] = float(r[metric])
    return out


def mean_sf_non_increasing(rows):
    bad = []
    for s, c in curves(rows, "mean_sf").items():
        ns = sorted(c)
        bad += [f"{s}: {c[a]:.4f}@{a} -> {c[b]:.4f}@{b}" for a, b in zip(ns, ns[1:]) if c[b] > c[a] + SLACK]
    return not bad, "; ".join(bad) or "all strategies non-increasing"


def std_sf_settles(rows, n_from: int = 10):
    bad = []
    for s, c in curves(rows, "std_sf").items():
        ns = [n for n in sorted(c) if n >= n_from]
        bad += [f"{s}: rises {c[a]:.4f}@{a} -> {c[b]:.4f}@{b}" for a, b in zip(ns, ns[1:]) if c[b] > c[a] + SLACK]
        if len(ns) >= 2 and c[ns[-2]] - c[ns[-1]] > STD_SETTLE:
            bad.append(f"{s}: still dropping {c[ns[-2]] - c[ns[-1]]:.4f} at n={ns[-1]}")
    return not bad, "; ".join(bad) or f"std_sf non-increasing and settled for n >= {n_from}"


def entropy_ordering(rows, n_from: int = 20):
    c = curves(rows, "entropy_fp")
    bad = []
    for n in sorted(c["FCFS"]):
        if n < n_from:
            continue
        others = min(c[s][n] for s in c if s != "FCFS")
        if c["FCFS"][n] > FCFS_ENTROPY_SHARE * others:
            bad.append(f"FCFS {c['FCFS'][n]:.3f} not near zero (others >= {others:.3f}) at n={n}")
        for rival in ("P_FCFS", "MAXMIN"):
            if not c["NFACES"][n] < c[rival][n]:
                bad.append(f"NFACES {c['NFACES'][n]:.3f} >= {rival} {c[rival][n]:.3f} at n={n}")
    return not bad, "; ".join(bad) or "FCFS near zero, NFACES below P_FCFS and MAXMIN"


def utilization_ordering(rows, n_from: int = 15):
    c = curves(rows, "utilization")
    bad = []
    for n in sorted(c["NFACES"]):
        if n < n_from:
            continue
        nf, mm = c["NFACES"][n], c["MAXMIN"][n]
        if abs(nf - mm) > UTIL_TIE:
            bad.append(f"NFACES {nf:.3f} vs MAXMIN {mm:.3f} differ at n={n}")
        best_single = max(c[s][n] for s in ONE_AT_A_TIME if s in c)
        if min(nf, mm) < best_single - SLACK:
            bad.append(f"one-at-a-time best {best_single:.3f} beats min(NFACES, MAXMIN) {min(nf, mm):.3f} at n={n}")
        if c["FACES"][n] < max(c["FCFS"][n], c["P_FCFS"][n]) - SLACK:
            bad.append(f"FACES {c['FACES'][n]:.3f} below FCFS/P_FCFS at n={n}")
    return not bad, "; ".join(bad) or "NFACES ~ MAXMIN >= one-at-a-time; FACES best of FCFS/P_FCFS/FACES"


CHECKS = {
    "4a mean satisfaction non-increasing": mean_sf_non_increasing,
    "4b std of satisfaction settles": std_sf_settles,
    "4c entropy ordering": entropy_ordering,
    "4d utilization ordering": utilization_ordering,
}


def evaluate_trends(rows) -> dict[str, tuple[bool, str]]:
    return {name: check(rows) for name, check in CHECKS.items()}
