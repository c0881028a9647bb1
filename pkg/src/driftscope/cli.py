"""Command-line interface: detect, generate, evaluate, map, chart.

Exit codes: 0 success, 1 analysis error, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .changepoint import ChangePointConfig
from .errors import DriftScopeError
from .evaluation import DRIFT_KINDS, GroundTruth, default_alphabet, generate_drifting_log, score
from .log_ingest import WindowSpec, to_csv_text
from .pipeline import (RunConfig, chart_svg_from_report, load_report, map_svg_from_report,
                       render_all, run, summary_table)
from .series import write_matrix_csv
from .viz import write_files

log = logging.getLogger("driftscope")


class UsageError(Exception):
    pass


def _penalty(text: str):
    if text == "auto":
        return "auto"
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"penalty must be a number or 'auto', got {text!r}")
    if v <= 0:
        raise argparse.ArgumentTypeError("penalty must be positive")
    return v


def _drift(text: str):
    pos, _, kind = text.partition(":")
    kind = kind or "remove"
    if kind not in DRIFT_KINDS:
        raise argparse.ArgumentTypeError(f"drift kind must be one of {DRIFT_KINDS}")
    try:
        return int(pos), kind
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad drift position {pos!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="driftscope", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", help="detect and explain drifts in an event log")
    d.add_argument("input")
    d.add_argument("--format", choices=["csv", "xes"])
    d.add_argument("--case-col", default="case_id")
    d.add_argument("--activity-col", default="activity")
    d.add_argument("--time-col", default="timestamp")
    d.add_argument("--window-size", type=int, help="traces per window (default: auto)")
    d.add_argument("--window-step", type=int, help="traces between window starts (default: auto)")
    d.add_argument("--kernel", choices=["rbf", "linear"], default="rbf")
    d.add_argument("--penalty", type=_penalty, default="auto")
    d.add_argument("--min-segment", type=int, default=2)
    d.add_argument("--cluster-threshold", type=float, default=0.7)
    d.add_argument("--linkage", choices=["weighted"], default="weighted")
    d.add_argument("--distance", choices=["correlation"], default="correlation")
    d.add_argument("--no-prune", action="store_true", help="keep all-zero constraints for clustering")
    d.add_argument("--out-dir", default=".")
    d.add_argument("--prefix", default="drift")
    d.add_argument("--matrix-csv", help="also dump the confidence matrix to this CSV")
    d.add_argument("--seed", type=int, default=0)

    g = sub.add_parser("generate", help="generate a synthetic log with injected drifts")
    g.add_argument("-n", "--n-traces", type=int, required=True)
    g.add_argument("--drift", type=_drift, action="append", default=[],
                   help="POSITION[:KIND], KIND in remove/swap/loop; repeatable")
    g.add_argument("--activities", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="log CSV path")
    g.add_argument("--truth", help="ground-truth JSON path (default: next to --out)")

    e = sub.add_parser("evaluate", help="score detected drifts against ground truth")
    e.add_argument("--detected", required=True, help="report JSON from detect")
    e.add_argument("--truth", required=True, help="ground-truth JSON")
    e.add_argument("--tolerance", type=int, default=1)
    e.add_argument("--scope", choices=["overall", "clusters"], default="overall",
                   help="overall change points, or the union of per-cluster ones")
    e.add_argument("--json", dest="json_out", help="also write the result here")

    m = sub.add_parser("map", help="re-render the Drift Map from a saved report")
    m.add_argument("--report", required=True)
    m.add_argument("--out", required=True)

    c = sub.add_parser("chart", help="re-render one Drift Chart from a saved report")
    c.add_argument("--report", required=True)
    c.add_argument("--cluster", type=int, required=True)
    c.add_argument("--out", required=True)
    return p


def cmd_detect(args) -> int:
    if (args.window_size is None) != (args.window_step is None):
        raise UsageError("--window-size and --window-step go together")
    window = "auto" if args.window_size is None else WindowSpec(args.window_size, args.window_step)
    cfg = RunConfig(
        input=args.input, format=args.format, window=window,
        changepoint=ChangePointConfig(kernel=args.kernel, penalty=args.penalty,
                                      min_segment=args.min_segment),
        cluster_threshold=args.cluster_threshold, prune=not args.no_prune,
        out_dir=args.out_dir, prefix=args.prefix, seed=args.seed,
        columns={"case": args.case_col, "activity": args.activity_col, "timestamp": args.time_col},
    )
    if not Path(args.input).is_file():
        raise FileNotFoundError(args.input)
    rep = run(cfg)
    if args.matrix_csv:
        write_matrix_csv(rep.full_matrix, args.matrix_csv)
    paths = render_all(rep, cfg.out_dir, cfg.prefix)
    p = rep.parameters
    print(f"{p['log_size']} traces, {p['windows']} windows (size {p['window_size']}, "
          f"step {p['window_step']}, {p['dropped_tail']} trailing traces unused)")
    print(f"overall change points: {list(rep.overall.change_points)}")
    print(summary_table(rep))
    for path in paths:
        print(f"wrote {path}")
    return 0


def cmd_generate(args) -> int:
    if args.n_traces < 1:
        raise UsageError("--n-traces must be positive")
    drifts = sorted(args.drift)
    log_, truth = generate_drifting_log(args.n_traces, default_alphabet(args.activities),
                                        drifts, args.seed)
    out = Path(args.out)
    truth_path = Path(args.truth) if args.truth else out.with_name(out.stem + "_truth.json")
    write_files({out: to_csv_text(log_), truth_path: truth.to_json()})
    print(f"wrote {out} ({len(log_)} traces) and {truth_path}")
    return 0


def cmd_evaluate(args) -> int:
    rep = load_report(args.detected)
    truth = GroundTruth.load(args.truth, args.tolerance)
    p = rep["parameters"]
    tw = truth.in_windows(WindowSpec(p["window_size"], p["window_step"]))
    if args.scope == "overall":
        detected = [c["window"] for c in rep["overall"]["change_points"]]
    else:
        detected = sorted({c["window"] for cl in rep["clusters"] for c in cl["change_points"]})
    res = score(detected, tw, args.tolerance)
    print(f"precision={res.precision:.3f} recall={res.recall:.3f} F={res.f_score:.3f}")
    for note in res.notes:
        print(f"note: {note}")
    if args.json_out:
        write_files({args.json_out: json.dumps(res.as_dict(), indent=2) + "\n"})
    return 0


def cmd_map(args) -> int:
    write_files({args.out: map_svg_from_report(load_report(args.report))})
    return 0


def cmd_chart(args) -> int:
    rep = load_report(args.report)
    try:
        svg = chart_svg_from_report(rep, args.cluster)
    except KeyError as exc:
        raise UsageError(str(exc.args[0]))
    write_files({args.out: svg})
    return 0


COMMANDS = {"detect": cmd_detect, "generate": cmd_generate, "evaluate": cmd_evaluate,
            "map": cmd_map, "chart": cmd_chart}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"driftscope: error: {exc}", file=sys.stderr)
        return 2
    except (DriftScopeError, ValueError) as exc:
        print(f"driftscope: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
