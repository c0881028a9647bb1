"""Drift Map and Drift Chart rendering as standalone SVG."""
from __future__ import annotations

import os
import tempfile
from datetime import datetime
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from ._plasma import PLASMA

WIDTH, HEIGHT = 1200, 800
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 70
MAX_TICKS = 10


def colormap(value: float) -> str:
    v = min(max(float(value), 0.0), 1.0)
    return PLASMA[int(round(v * 255))]


def _tick_indices(n: int) -> list[int]:
    if n <= MAX_TICKS:
        return list(range(n))
    return sorted({int(round(k * (n - 1) / (MAX_TICKS - 1))) for k in range(MAX_TICKS)})


def _header(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<title>{escape(title)}</title>",
        f'<rect class="background" x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]


def _date_ticks(starts: Sequence[datetime], x_of, y: float) -> list[str]:
    out = []
    for j in _tick_indices(len(starts)):
        x = x_of(j)
        out.append(f'<line class="tick" x1="{x:.2f}" y1="{y:.2f}" x2="{x:.2f}" y2="{y + 5:.2f}" '
                   'stroke="#000000"/>')
        out.append(f'<text class="tick-label" x="{x:.2f}" y="{y + 18:.2f}" font-size="11" '
                   f'text-anchor="middle">{starts[j].date().isoformat()}</text>')
    return out


def drift_map_svg(values, display_order: Sequence[int], cluster_of: Sequence[int],
                  change_points: Sequence[int], window_starts: Sequence[datetime],
                  title: str = "Drift Map") -> str:
    """Heatmap of constraints (y, grouped by cluster) against windows (x)."""
    x = np.asarray(values, dtype=float)
    n_rows, n_cols = x.shape
    if sorted(display_order) != list(range(n_rows)):
        raise ValueError("display order must cover every row exactly once")
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    cw = pw / n_cols
    rh = ph / max(n_rows, 1)
    out = _header(title)
    out.append(f'<text class="title" x="{WIDTH / 2:.2f}" y="24" font-size="16" '
               f'text-anchor="middle">{escape(title)}</text>')
    out.append('<g class="cells" shape-rendering="crispEdges">')
    for pos, r in enumerate(display_order):
        y = TOP + pos * rh
        for j in range(n_cols):
            out.append(f'<rect class="cell" x="{LEFT + j * cw:.3f}" y="{y:.3f}" width="{cw:.3f}" '
                       f'height="{rh:.3f}" fill="{colormap(x[r, j])}"/>')
    out.append("</g>")
    for pos in range(1, n_rows):
        if cluster_of[display_order[pos]] != cluster_of[display_order[pos - 1]]:
            y = TOP + pos * rh
            out.append(f'<line class="cluster-boundary" x1="{LEFT}" y1="{y:.3f}" '
                       f'x2="{LEFT + pw}" y2="{y:.3f}" stroke="#ffffff" stroke-width="1"/>')
    for cp in change_points:
        xx = LEFT + (cp - 1) * cw
        out.append(f'<line class="changepoint" x1="{xx:.3f}" y1="{TOP}" x2="{xx:.3f}" '
                   f'y2="{TOP + ph}" stroke="#000000" stroke-width="2"/>')
    out.append(f'<rect class="frame" x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" '
               'fill="none" stroke="#000000"/>')
    out.extend(_date_ticks(window_starts, lambda j: LEFT + (j + 0.5) * cw, TOP + ph))
    out.append(f'<text class="axis-label" x="20" y="{TOP + ph / 2:.2f}" font-size="12" '
               f'transform="rotate(-90 20 {TOP + ph / 2:.2f})" text-anchor="middle">constraints</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def drift_chart_svg(mean_series, change_points: Sequence[int], window_starts: Sequence[datetime],
                    title: str = "Drift Chart") -> str:
    """Mean confidence of one cluster over time, y fixed to [0, 1]."""
    y = np.asarray(mean_series, dtype=float)
    if y.size == 0:
        raise ValueError("empty mean series")
    n = len(y)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    step = pw / max(n - 1, 1)

    def x_of(j):
        return LEFT + j * step if n > 1 else LEFT + pw / 2

    def y_of(v):
        return TOP + (1.0 - min(max(v, 0.0), 1.0)) * ph

    out = _header(title)
    out.append(f'<text class="title" x="{WIDTH / 2:.2f}" y="24" font-size="16" '
               f'text-anchor="middle">{escape(title)}</text>')
    out.append(f'<rect class="frame" x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" '
               'fill="none" stroke="#000000"/>')
    for v in (0.0, 0.25, 0.5, 0.75, 1.0):
        out.append(f'<text class="y-label" x="{LEFT - 8}" y="{y_of(v) + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{v:.2f}</text>')
    pts = " ".join(f"{x_of(j):.3f},{y_of(v):.3f}" for j, v in enumerate(y))
    out.append(f'<polyline class="mean-confidence" points="{pts}" fill="none" '
               'stroke="#0d0887" stroke-width="2"/>')
    for cp in change_points:
        xx = x_of(cp - 1)
        out.append(f'<line class="changepoint" x1="{xx:.3f}" y1="{TOP}" x2="{xx:.3f}" '
                   f'y2="{TOP + ph}" stroke="#000000" stroke-dasharray="6,4"/>')
    out.extend(_date_ticks(window_starts, x_of, TOP + ph))
    out.append(f'<text class="axis-label" x="20" y="{TOP + ph / 2:.2f}" font-size="12" '
               f'transform="rotate(-90 20 {TOP + ph / 2:.2f})" text-anchor="middle">'
               "mean confidence</text>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_files(docs: dict) -> list[Path]:
    """Write ``{path: text}`` atomically; on failure nothing is left behind."""
    written: list[Path] = []
    try:
        for path, text in docs.items():
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    fh.write(text)
                os.replace(tmp, path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
            written.append(path)
    except OSError as exc:
        for p in written:
            p.unlink(missing_ok=True)
        raise OSError(f"cannot write {path}: {exc}") from exc
    return written


def render_drift_map(m, ca, overall, out) -> str:
    svg = drift_map_svg(m.values, ca.display_order, ca.cluster_of, overall.change_points,
                        [s for s, _ in m.window_times])
    write_files({out: svg})
    return svg


def render_drift_chart(cd, window_starts: Sequence[datetime], out) -> str:
    svg = drift_chart_svg(cd.mean_series, cd.change_points, window_starts,
                          title=f"Cluster {cd.cluster_id}, Ertc {cd.ertc:.2f}")
    write_files({out: svg})
    return svg
