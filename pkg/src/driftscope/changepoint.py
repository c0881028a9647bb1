"""Penalized kernel change-point detection with PELT.

Series are arrays of shape (n_rows, n_windows); each column is the vector
observed at one window. Change points are reported as the 1-based index of
the first window of each new segment.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

log = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 50


@dataclass(frozen=True)
class ChangePointConfig:
    kernel: str = "rbf"
    bandwidth: Union[float, str] = "median-heuristic"
    penalty: Union[float, str] = "auto"
    min_segment: int = 2

    def __post_init__(self):
        if self.kernel not in ("rbf", "linear"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.min_segment < 1:
            raise ValueError("min_segment must be >= 1")
        if not isinstance(self.penalty, str) and not self.penalty > 0:
            raise ValueError("penalty must be positive")
        if self.penalty != "auto" and isinstance(self.penalty, str):
            raise ValueError(f"penalty must be a number or 'auto', got {self.penalty!r}")
        if isinstance(self.bandwidth, str):
            if self.bandwidth != "median-heuristic":
                raise ValueError(f"unknown bandwidth rule {self.bandwidth!r}")
        elif not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")


@dataclass(frozen=True)
class Segmentation:
    change_points: tuple[int, ...]
    total_cost: float
    penalty: float = float("nan")

    @property
    def n_segments(self) -> int:
        return len(self.change_points) + 1


def _as_2d(series) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2:
        raise ValueError("series must be 1-D or (rows, windows)")
    return x


def median_heuristic_bandwidth(series) -> float:
    x = _as_2d(series)
    n = x.shape[1]
    if n < 2:
        raise ValueError("median heuristic needs at least 2 windows")
    cols = x.T
    iu = np.triu_indices(n, k=1)
    d = np.sqrt(((cols[:, None, :] - cols[None, :, :]) ** 2).sum(-1))[iu]
    h = float(np.median(d))
    return h if h > 0 else 1.0


def _bandwidth(x: np.ndarray, cfg: ChangePointConfig) -> float:
    if cfg.bandwidth == "median-heuristic":
        return median_heuristic_bandwidth(x) if x.shape[1] >= 2 else 1.0
    return float(cfg.bandwidth)


def kernel(x: np.ndarray, y: np.ndarray, cfg: ChangePointConfig, h: float = 1.0) -> float:
    if cfg.kernel == "linear":
        return float(np.dot(x, y))
    return math.exp(-float(np.sum((x - y) ** 2)) / (2 * h * h))


def gram_matrix(series, cfg: ChangePointConfig, h: float | None = None) -> np.ndarray:
    x = _as_2d(series)
    if cfg.kernel == "linear":
        return x.T @ x
    if h is None:
        h = _bandwidth(x, cfg)
    sq = np.sum(x * x, axis=0)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2 * (x.T @ x), 0.0)
    return np.exp(-d2 / (2 * h * h))


def _pairwise_gram(x: np.ndarray, cfg: ChangePointConfig, h: float | None) -> np.ndarray:
    n = x.shape[1]
    g = np.empty((n, n))
    for t in range(n):
        for u in range(t, n):
            g[t, u] = g[u, t] = kernel(x[:, t], x[:, u], cfg, h)
    return g


def segment_cost(series, cfg: ChangePointConfig, start: int = 0, end: int | None = None,
                 h: float | None = None) -> float:
    """Kernel cost of windows [start, end) by direct pairwise summation.

    c = sum_t k(x_t, x_t) - (1 / len) sum_{t,u} k(x_t, x_u)
    """
    x = _as_2d(series)
    end = x.shape[1] if end is None else end
    if end - start < 1:
        raise ValueError(f"empty segment [{start}, {end})")
    if h is None and cfg.kernel == "rbf":
        h = _bandwidth(x, cfg)
    g = _pairwise_gram(x[:, start:end], cfg, h)
    return max(float(np.trace(g) - g.sum() / (end - start)), 0.0)


class _KernelCost:
    """O(1) segment costs from 2-D prefix sums of the Gram matrix."""

    def __init__(self, gram: np.ndarray):
        n = gram.shape[0]
        self.n = n
        self.diag = np.concatenate([[0.0], np.cumsum(np.diag(gram))])
        s = np.zeros((n + 1, n + 1))
        s[1:, 1:] = gram.cumsum(0).cumsum(1)
        self.block = s

    def __call__(self, a: int, b: int) -> float:
        s = self.block
        within = s[b, b] - s[a, b] - s[b, a] + s[a, a]
        return max(self.diag[b] - self.diag[a] - within / (b - a), 0.0)


def _check_length(n: int, cfg: ChangePointConfig):
    if n < 2 * cfg.min_segment:
        raise ValueError(
            f"series of {n} windows is too short for min_segment={cfg.min_segment}")


def _penalty(x: np.ndarray, cfg: ChangePointConfig) -> float:
    return auto_penalty(x, cfg) if cfg.penalty == "auto" else float(cfg.penalty)


def _backtrack(last: list[int], n: int) -> tuple[int, ...]:
    cps = []
    t = n
    while t > 0:
        t = last[t]
        if t > 0:
            cps.append(t + 1)
    return tuple(reversed(cps))


def pelt_detect(series, cfg: ChangePointConfig, penalty: float | None = None,
                gram: np.ndarray | None = None) -> Segmentation:
    """Exact minimizer of sum(segment cost) + penalty * n_segments via PELT.

    Splitting a segment never increases the kernel cost, so a candidate
    start tau can be discarded once F(tau) + c(tau, t) > F(t). With a
    minimum segment length the discard only takes effect from t + min_segment
    on, since t itself is not yet an admissible start before that.
    """
    x = _as_2d(series)
    n = x.shape[1]
    m = cfg.min_segment
    _check_length(n, cfg)
    pen = _penalty(x, cfg) if penalty is None else float(penalty)
    cost = _KernelCost(gram_matrix(x, cfg) if gram is None else gram)

    inf = math.inf
    F = [inf] * (n + 1)
    F[0] = 0.0
    last = [0] * (n + 1)
    tol = 1e-12 * (1.0 + abs(cost.diag[-1]))
    cand: list[int] = [0]
    expiry: dict[int, int] = {}
    for t in range(m, n + 1):
        best, arg = inf, 0
        vals = {}
        for tau in cand:
            if t - tau < m or F[tau] == inf:
                continue
            v = F[tau] + cost(tau, t) + pen
            vals[tau] = v
            if v < best:
                best, arg = v, tau
        F[t], last[t] = best, arg
        for tau, v in vals.items():
            if v - pen > best + tol and tau not in expiry:
                expiry[tau] = t + m
        cand = [tau for tau in cand if expiry.get(tau, n + 2) > t + 1]
        cand.append(t - m + 1)
    return Segmentation(_backtrack(last, n), float(F[n]), pen)


def brute_force_segmentation(series, cfg: ChangePointConfig,
                             penalty: float | None = None) -> Segmentation:
    """Optimal partitioning without pruning, costs by direct summation.

    Test oracle for pelt_detect; refuses series longer than 50 windows.
    """
    x = _as_2d(series)
    n = x.shape[1]
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force refuses {n} > {BRUTE_FORCE_LIMIT} windows")
    m = cfg.min_segment
    _check_length(n, cfg)
    pen = _penalty(x, cfg) if penalty is None else float(penalty)
    h = _bandwidth(x, cfg) if cfg.kernel == "rbf" else None
    g = _pairwise_gram(x, cfg, h)
    F = [math.inf] * (n + 1)
    F[0] = 0.0
    last = [0] * (n + 1)
    for t in range(m, n + 1):
        for tau in range(0, t - m + 1):
            if F[tau] == math.inf:
                continue
            block = g[tau:t, tau:t]
            c = max(float(np.trace(block) - block.sum() / (t - tau)), 0.0)
            v = F[tau] + c + pen
            if v < F[t]:
                F[t], last[t] = v, tau
    return Segmentation(_backtrack(last, n), float(F[n]), pen)


def penalty_grid(series, cfg: ChangePointConfig, size: int = 20) -> np.ndarray:
    """Log-spaced penalties from 0.1 B to 10 B with B = unsegmented cost / n."""
    x = _as_2d(series)
    base = _KernelCost(gram_matrix(x, cfg))(0, x.shape[1]) / x.shape[1]
    if base <= 0:
        base = 1.0
    return np.geomspace(0.1 * base, 10 * base, size)


def _elbow(counts: np.ndarray, saturation: int | None = None) -> int:
    """Grid index chosen on the step curve of #change-points versus penalty.

    On a step curve the curvature sits at the corners; the elbow is the
    corner opening the longest flat run (ties go to the larger penalty),
    and the middle of that run is returned so the choice is not on the edge
    of a count transition. Runs using more than half of the `saturation`
    (admissible maximum) change points belong to the under-penalized regime
    and are skipped when anything else is available.
    """
    runs = []  # (length, start)
    start = 0
    for i in range(1, len(counts) + 1):
        if i == len(counts) or counts[i] != counts[start]:
            runs.append((i - start, start))
            start = i
    if saturation is not None:
        moderate = [r for r in runs if 2 * counts[r[1]] <= saturation]
        runs = moderate or runs
    length, start = max(runs)
    return start + (length - 1) // 2


def penalty_curve(series, cfg: ChangePointConfig, grid=None):
    x = _as_2d(series)
    gram = gram_matrix(x, cfg)
    grid = penalty_grid(x, cfg) if grid is None else np.asarray(grid, dtype=float)
    counts = np.array([len(pelt_detect(x, cfg, p, gram).change_points) for p in grid])
    return grid, counts


def auto_penalty(series, cfg: ChangePointConfig) -> float:
    """Pick the penalty at the elbow of the penalty versus #change-points curve."""
    x = _as_2d(series)
    _check_length(x.shape[1], cfg)
    grid, counts = penalty_curve(x, cfg)
    if counts.max() == 0:
        log.warning("no change points for any penalty in the grid; using the grid maximum")
        return float(grid[-1])
    if counts.min() == counts.max():
        return float(grid[-1])
    return float(grid[_elbow(counts, x.shape[1] // cfg.min_segment - 1)])
