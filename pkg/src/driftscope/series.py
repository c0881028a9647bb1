"""Per-window confidence time series of every constraint (the matrix D)."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Sequence

import numpy as np

from .declare import DEFAULT_REPERTOIRE, Constraint, Template, constraint_space, trace_stat_arrays
from .errors import WindowConfigError
from .log_ingest import EventLog, WindowSpec, format_timestamp, window_count, windows

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConfidenceMatrix:
    """Rows are constraints, columns are windows; entry (i, j) is Conf_{i,j}."""

    values: np.ndarray
    constraints: tuple[Constraint, ...]
    window_times: tuple[tuple[datetime, datetime], ...]

    @property
    def shape(self):
        return self.values.shape

    @property
    def n_windows(self) -> int:
        return self.values.shape[1]

    def row(self, c: Constraint) -> np.ndarray:
        return self.values[self.constraints.index(c)]

    def subset(self, rows: Sequence[int]) -> "ConfidenceMatrix":
        rows = list(rows)
        return ConfidenceMatrix(self.values[rows], tuple(self.constraints[i] for i in rows),
                                self.window_times)


def build_matrix(log_: EventLog, spec: WindowSpec,
                 repertoire: Iterable[Template] = DEFAULT_REPERTOIRE,
                 constraints: Sequence[Constraint] | None = None) -> ConfidenceMatrix:
    """Confidence of every constraint over every window of a sorted log.

    Statistics are computed once per distinct trace variant and combined
    per window through a window-by-variant count matrix.
    """
    n = window_count(len(log_), spec)
    if n < 2:
        raise WindowConfigError(f"only {n} window; drift detection needs at least 2")
    subs = windows(log_, spec)
    if constraints is None:
        constraints = constraint_space(log_.alphabet, repertoire)
    constraints = tuple(constraints)

    variant_ids: dict[tuple[str, ...], int] = {}
    trace_variant = np.empty(len(log_), dtype=np.int64)
    for k, t in enumerate(log_.traces):
        trace_variant[k] = variant_ids.setdefault(t.activities, len(variant_ids))
    stats = np.empty((3, len(variant_ids), len(constraints)), dtype=np.int64)
    for variant, v in variant_ids.items():
        stats[:, v, :] = trace_stat_arrays(constraints, variant)

    counts = np.zeros((n, len(variant_ids)), dtype=np.int64)
    for j in range(n):
        lo = j * spec.win_step
        counts[j] = np.bincount(trace_variant[lo: lo + spec.win_size], minlength=len(variant_ids))
    acts, sat, hit = (counts @ stats[k] for k in range(3))  # each n x C
    with np.errstate(invalid="ignore", divide="ignore"):
        conf = np.where(acts > 0, sat / np.maximum(acts, 1), 0.0) * (hit / spec.win_size)
    return ConfidenceMatrix(np.ascontiguousarray(conf.T), constraints,
                            tuple((s.start_time, s.end_time) for s in subs))


def prune_inactive(m: ConfidenceMatrix, enabled: bool = True) -> tuple[ConfidenceMatrix, list[int]]:
    """Remove rows that are zero in every window.

    Returns the pruned matrix and the original indices of the kept rows.
    """
    if not enabled:
        return m, list(range(m.shape[0]))
    keep = [i for i in range(m.shape[0]) if np.any(m.values[i] != 0)]
    if not keep:
        log.warning("every constraint has zero confidence in every window")
        empty = np.zeros((0, m.n_windows))
        return ConfidenceMatrix(empty, (), m.window_times), []
    return m.subset(keep), keep


def write_matrix_csv(m: ConfidenceMatrix, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["constraint"] + [format_timestamp(s) for s, _ in m.window_times])
        for c, row in zip(m.constraints, m.values):
            w.writerow([str(c)] + [f"{v:.6f}" for v in row])
