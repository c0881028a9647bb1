"""Number of change points against penalty for one generated log.

Shows the curve the automatic penalty is read from, for the whole matrix
and for each cluster, and marks the chosen value.

    python3 scripts/penalty_curve.py --seed 3
"""
import argparse

from driftscope.changepoint import auto_penalty, penalty_curve
from driftscope.evaluation import generate_drifting_log
from driftscope.pipeline import RunConfig, detect


def show(name, x, cfg):
    grid, counts = penalty_curve(x, cfg)
    chosen = auto_penalty(x, cfg)
    print(f"\n{name} ({x.shape[0]} rows)")
    for pen, k in zip(grid, counts):
        mark = "  <- chosen" if pen == chosen else ""
        print(f"  pen {pen:10.4f}  {int(k):3d} change points{mark}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-n", "--n-traces", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--clusters", type=int, default=2, help="how many clusters to show")
    args = ap.parse_args()

    n = args.n_traces
    log, _ = generate_drifting_log(n, drift_spec=[(n // 3, "remove"), (2 * n // 3, "loop")], seed=args.seed)
    cfg = RunConfig()
    rep = detect(log, cfg)
    m = rep.matrix
    show("all constraints", m.values, cfg.changepoint)
    for c in rep.clusters[: args.clusters]:
        rows = m.values[list(c.rows)]
        if rows.shape[1] >= 2 * cfg.changepoint.min_segment and (rows.max(1) > rows.min(1)).any():
            show(f"cluster {c.cluster_id}", rows, cfg.changepoint)


if __name__ == "__main__":
    main()
