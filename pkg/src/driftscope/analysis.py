"""Drift findings: change points overall and per cluster, erratic ranking, explanations."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .changepoint import ChangePointConfig, Segmentation, pelt_detect
from .clustering import ClusterAssignment
from .declare import Constraint, subsumption_reduce
from .series import ConfidenceMatrix


def erratic(rows) -> float:
    """Poly-line length score of a cluster.

    sum over member series of sqrt(1 + (Delta * n_windows)^2), where Delta
    is the total absolute variation between consecutive windows.
    """
    x = np.atleast_2d(np.asarray(rows, dtype=float))
    if x.size == 0:
        raise ValueError("empty cluster")
    delta = np.abs(np.diff(x, axis=1)).sum(axis=1)
    return float(np.sqrt(1.0 + (delta * x.shape[1]) ** 2).sum())


@dataclass(frozen=True)
class ClusterDrift:
    cluster_id: int
    rows: tuple[int, ...]
    change_points: tuple[int, ...]
    mean_series: np.ndarray
    ertc: float
    penalty: float = float("nan")


@dataclass(frozen=True)
class ConstraintStats:
    text: str
    min: float
    max: float
    mean: float
    pre_mean: float | None
    post_mean: float | None

    def table_row(self) -> str:
        """Percentages with one decimal, Template | Activity 1 | Activity 2 | Min | Max | Mean."""
        c = Constraint.parse(self.text)
        a1 = c.params[0]
        a2 = c.params[1] if len(c.params) > 1 else ""
        return " | ".join([c.template.value, a1, a2] + [f"{v:.1f}" for v in (self.min, self.max, self.mean)])


def _segment(x: np.ndarray, cfg: ChangePointConfig) -> Segmentation:
    m = cfg.min_segment
    if x.shape[1] < 2 * m:
        return Segmentation((), 0.0)
    if not np.any(np.ptp(x, axis=1) > 0):
        # constant input: no split can lower the cost
        return Segmentation((), 0.0, float(cfg.penalty) if cfg.penalty != "auto" else float("nan"))
    return pelt_detect(x, cfg)


def overall_changepoints(m: ConfidenceMatrix, cfg: ChangePointConfig) -> Segmentation:
    return _segment(m.values, cfg)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("DRIFTSCOPE_THREADS", "1")))
    except ValueError:
        return 1


def cluster_changepoints(m: ConfidenceMatrix, ca: ClusterAssignment,
                         cfg: ChangePointConfig) -> list[ClusterDrift]:
    ids = ca.cluster_ids()

    def one(cid):
        rows = ca.members(cid)
        sub = m.values[rows]
        seg = _segment(sub, cfg)
        return ClusterDrift(cid, tuple(rows), seg.change_points, sub.mean(axis=0),
                            erratic(sub), seg.penalty)

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        return list(pool.map(one, ids))


def explain_drift(m: ConfidenceMatrix, rows: Sequence[int],
                  change_point: int | None = None) -> list[ConstraintStats]:
    """Min/max/mean confidence (in percent) of each row, plus the means
    before and after `change_point` (1-based first window of the new segment).
    """
    if change_point is not None and not 2 <= change_point <= m.n_windows:
        raise ValueError(f"change point {change_point} outside 2..{m.n_windows}")
    out = []
    for r in rows:
        v = m.values[r] * 100.0
        pre = post = None
        if change_point is not None:
            pre = float(v[: change_point - 1].mean())
            post = float(v[change_point - 1:].mean())
        out.append(ConstraintStats(str(m.constraints[r]), float(v.min()), float(v.max()),
                                   float(v.mean()), pre, post))
    return out


def main_change_point(mean_series: np.ndarray, change_points: Sequence[int]) -> int | None:
    """The change point with the largest jump between adjacent segment means."""
    if not change_points:
        return None
    bounds = [0] + [c - 1 for c in change_points] + [len(mean_series)]
    means = [mean_series[a:b].mean() for a, b in zip(bounds, bounds[1:])]
    jumps = [abs(means[k + 1] - means[k]) for k in range(len(change_points))]
    return change_points[int(np.argmax(jumps))]


def reduced_rows(m: ConfidenceMatrix, rows: Sequence[int], epsilon: float = 0.01) -> list[int]:
    items = [(m.constraints[r], m.values[r]) for r in rows]
    kept = {c for c, _ in subsumption_reduce(items, epsilon)}
    return [r for r in rows if m.constraints[r] in kept]


@dataclass
class DriftReport:
    matrix: ConfidenceMatrix  # analysed (pruned) matrix
    assignment: ClusterAssignment
    overall: Segmentation
    clusters: list[ClusterDrift]  # sorted by ertc, descending
    explanations: dict[int, list[ConstraintStats]]
    parameters: dict = field(default_factory=dict)
    full_matrix: ConfidenceMatrix | None = None
    kept_rows: list[int] | None = None

    @property
    def ranking(self) -> list[tuple[int, float]]:
        return [(c.cluster_id, c.ertc) for c in self.clusters]


def analyse(m: ConfidenceMatrix, ca: ClusterAssignment, cfg: ChangePointConfig,
            epsilon: float = 0.01) -> tuple[Segmentation, list[ClusterDrift], dict]:
    overall = overall_changepoints(m, cfg)
    drifts = cluster_changepoints(m, ca, cfg)
    drifts.sort(key=lambda d: (-d.ertc, d.cluster_id))
    expl = {}
    for d in drifts:
        cp = main_change_point(d.mean_series, d.change_points)
        expl[d.cluster_id] = explain_drift(m, reduced_rows(m, d.rows, epsilon), cp)
    return overall, drifts, expl

