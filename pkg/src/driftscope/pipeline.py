"""End-to-end drift detection: log -> matrix -> clusters -> change points -> report."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .analysis import DriftReport, analyse
from .changepoint import ChangePointConfig
from .clustering import ClusterAssignment, cluster_series
from .declare import DEFAULT_REPERTOIRE, Constraint, Template
from .log_ingest import (EventLog, WindowSpec, dropped_tail, format_timestamp, parse_timestamp,
                         read_log, sort_by_first_timestamp, window_count)
from .series import ConfidenceMatrix, build_matrix, prune_inactive
from .viz import drift_chart_svg, drift_map_svg, write_files

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    input: str | None = None
    format: str | None = None
    window: WindowSpec | str = "auto"
    repertoire: tuple[Template, ...] = DEFAULT_REPERTOIRE
    changepoint: ChangePointConfig = field(default_factory=ChangePointConfig)
    cluster_threshold: float = 0.7
    prune: bool = True
    epsilon: float = 0.01
    out_dir: str = "."
    prefix: str = "drift"
    columns: dict | None = None
    seed: int = 0

    def window_spec(self, log_size: int) -> WindowSpec:
        if self.window == "auto":
            return WindowSpec.auto(log_size)
        return self.window


def detect(log: EventLog, cfg: RunConfig) -> DriftReport:
    log = sort_by_first_timestamp(log)
    spec = cfg.window_spec(len(log))
    full = build_matrix(log, spec, cfg.repertoire)
    m, kept = prune_inactive(full, cfg.prune)
    ca = cluster_series(m.values, cfg.cluster_threshold)
    overall, drifts, expl = analyse(m, ca, cfg.changepoint, cfg.epsilon)
    cp = cfg.changepoint
    params = {
        "log_size": len(log),
        "window_size": spec.win_size,
        "window_step": spec.win_step,
        "windows": window_count(len(log), spec),
        "dropped_tail": dropped_tail(len(log), spec),
        "constraints": len(full.constraints),
        "active_constraints": len(m.constraints),
        "repertoire": [t.value for t in cfg.repertoire],
        "kernel": cp.kernel,
        "bandwidth": cp.bandwidth,
        "penalty": cp.penalty,
        "overall_penalty": _num(overall.penalty),
        "min_segment": cp.min_segment,
        "linkage": "weighted",
        "distance": "correlation",
        "cluster_threshold": cfg.cluster_threshold,
        "prune_inactive": cfg.prune,
        "epsilon": cfg.epsilon,
    }
    return DriftReport(m, ca, overall, drifts, expl, params, full, kept)


def _num(x, nd: int = 6):
    if x is None:
        return None
    x = float(x)
    if np.isnan(x):
        return None
    return round(x, nd)


def _cps(cps: Sequence[int], m: ConfidenceMatrix) -> list[dict]:
    return [{"window": int(c), "timestamp": format_timestamp(m.window_times[c - 1][0])} for c in cps]


def map_assignment(n_rows: int, kept: Sequence[int], ca: ClusterAssignment) -> ClusterAssignment:
    """Lift a pruned-matrix assignment to all rows; pruned rows form a final group."""
    cluster_of = [0] * n_rows
    for r_pruned, cid in enumerate(ca.cluster_of):
        cluster_of[kept[r_pruned]] = cid
    order = [kept[r] for r in ca.display_order]
    kept_set = set(kept)
    rest = [r for r in range(n_rows) if r not in kept_set]
    if rest:
        for r in rest:
            cluster_of[r] = ca.m + 1
        order += rest
    return ClusterAssignment(tuple(cluster_of), tuple(order))


def report_dict(rep: DriftReport) -> dict:
    m, full = rep.matrix, rep.full_matrix or rep.matrix
    kept = rep.kept_rows if rep.kept_rows is not None else list(range(len(m.constraints)))
    clusters = []
    for d in rep.clusters:
        clusters.append({
            "id": d.cluster_id,
            "size": len(d.rows),
            "ertc": _num(d.ertc),
            "change_points": _cps(d.change_points, m),
            "penalty": _num(d.penalty),
            "mean_series": [_num(v) for v in d.mean_series],
            "members": [kept[r] for r in d.rows],
            "constraints": [
                {"text": s.text, "min": _num(s.min, 1), "max": _num(s.max, 1),
                 "mean": _num(s.mean, 1), "pre_mean": _num(s.pre_mean, 1),
                 "post_mean": _num(s.post_mean, 1)}
                for s in rep.explanations[d.cluster_id]
            ],
        })
    lifted = map_assignment(len(full.constraints), kept, rep.assignment)
    return {
        "schema_version": SCHEMA_VERSION,
        "parameters": rep.parameters,
        "overall": {"change_points": _cps(rep.overall.change_points, m)},
        "clusters": clusters,
        "map": {"display_order": list(lifted.display_order),
                "cluster_of": list(lifted.cluster_of)},
        "matrix": {
            "constraints": [str(c) for c in full.constraints],
            "windows": [{"start": format_timestamp(s), "end": format_timestamp(e)}
                        for s, e in full.window_times],
            "values": [[_num(v) for v in row] for row in full.values],
        },
    }


def report_json(rep: DriftReport) -> str:
    return json.dumps(report_dict(rep), indent=2, ensure_ascii=False) + "\n"


def load_report(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    if d.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"{path}: unsupported report schema {d.get('schema_version')!r}")
    return d


def matrix_from_report(d: dict) -> ConfidenceMatrix:
    mx = d["matrix"]
    return ConfidenceMatrix(
        np.array(mx["values"], dtype=float).reshape(len(mx["constraints"]), len(mx["windows"])),
        tuple(Constraint.parse(t) for t in mx["constraints"]),
        tuple((parse_timestamp(w["start"]), parse_timestamp(w["end"])) for w in mx["windows"]),
    )


def map_svg_from_report(d: dict) -> str:
    m = matrix_from_report(d)
    cps = [c["window"] for c in d["overall"]["change_points"]]
    return drift_map_svg(m.values, d["map"]["display_order"], d["map"]["cluster_of"], cps,
                         [s for s, _ in m.window_times])


def chart_svg_from_report(d: dict, cluster_id: int) -> str:
    m = matrix_from_report(d)
    for c in d["clusters"]:
        if c["id"] == cluster_id:
            return drift_chart_svg(c["mean_series"], [p["window"] for p in c["change_points"]],
                                   [s for s, _ in m.window_times],
                                   title=f"Cluster {cluster_id}, Ertc {c['ertc']:.2f}")
    raise KeyError(f"no cluster {cluster_id} in report")


def render_all(rep: DriftReport, out_dir, prefix: str, report_name: str | None = None) -> list[Path]:
    """Write the report JSON, the drift map and one chart per cluster."""
    d = report_dict(rep)
    out = Path(out_dir)
    docs = {out / f"{prefix}_map.svg": map_svg_from_report(d)}
    for c in d["clusters"]:
        docs[out / f"{prefix}_cluster{c['id']}.svg"] = chart_svg_from_report(d, c["id"])
    docs[out / (report_name or f"{prefix}_report.json")] = json.dumps(d, indent=2, ensure_ascii=False) + "\n"
    return write_files(docs)


def summary_table(rep: DriftReport) -> str:
    lines = [f"{'cluster':>7}  {'size':>5}  {'Ertc':>12}  {'drifts':>6}"]
    for c in rep.clusters:
        lines.append(f"{c.cluster_id:>7}  {len(c.rows):>5}  {c.ertc:>12.3f}  {len(c.change_points):>6}")
    return "\n".join(lines)


def run(cfg: RunConfig) -> DriftReport:
    log = read_log(cfg.input, cfg.format, cfg.columns)
    return detect(log, cfg)
