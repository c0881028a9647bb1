"""F-score evaluation against ground truth and a synthetic drifting-log generator."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Sequence

import numpy as np

from .log_ingest import EventLog, Trace, WindowSpec


@dataclass(frozen=True)
class GroundTruth:
    """Drift positions. For unit "trace" a position is the number of traces
    (in timestamp order) that precede the drift."""

    positions: tuple[int, ...]
    unit: str = "trace"
    tolerance: int = 1

    def __post_init__(self):
        if self.unit not in ("trace", "window"):
            raise ValueError(f"unknown unit {self.unit!r}")
        if any(b <= a for a, b in zip(self.positions, self.positions[1:])):
            raise ValueError("positions must be strictly increasing")

    def in_windows(self, spec: WindowSpec | None = None) -> list[int]:
        if self.unit == "window":
            return list(self.positions)
        if spec is None:
            raise ValueError("window spec needed to map trace positions to windows")
        return [trace_to_window(p, spec) for p in self.positions]

    def to_json(self) -> str:
        return json.dumps({"positions": list(self.positions), "unit": self.unit}, indent=2) + "\n"

    @classmethod
    def load(cls, path, tolerance: int = 1) -> "GroundTruth":
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
        return cls(tuple(int(p) for p in d["positions"]), d.get("unit", "trace"), tolerance)


def trace_to_window(position: int, spec: WindowSpec) -> int:
    """First window (1-based) whose centre lies at or after the drift.

    Window j spans traces (j-1)*step + 1 .. (j-1)*step + size, so its centre
    is (j-1)*step + (size+1)/2; the first drifted trace is position + 1.
    """
    j = math.ceil((position + 1 - (spec.win_size + 1) / 2) / spec.win_step) + 1
    return max(j, 1)


@dataclass(frozen=True)
class EvalResult:
    precision: float
    recall: float
    f_score: float
    matched: tuple[tuple[int, int], ...] = ()
    notes: tuple[str, ...] = field(default=())

    def as_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f_score": self.f_score,
                "matched": [list(p) for p in self.matched], "notes": list(self.notes)}


def score(detected: Sequence[int], truth: Sequence[int], tolerance: int = 1) -> EvalResult:
    """Greedy nearest-first one-to-one matching within ``tolerance`` windows.

    Empty detected (or truth) gives precision (or recall) 1 by convention.
    """
    detected = list(detected)
    truth = list(truth)
    pairs = sorted((abs(d - t), d, t, i, k)
                   for i, d in enumerate(detected) for k, t in enumerate(truth)
                   if abs(d - t) <= tolerance)
    used_d, used_t, matched = set(), set(), []
    for _, d, t, i, k in pairs:
        if i not in used_d and k not in used_t:
            used_d.add(i)
            used_t.add(k)
            matched.append((d, t))
    notes = []
    if detected:
        p = len(matched) / len(detected)
    else:
        p = 1.0
        notes.append("precision 0/0 taken as 1")
    if truth:
        r = len(matched) / len(truth)
    else:
        r = 1.0
        notes.append("recall 0/0 taken as 1")
    f = 0.0 if p == 0 or r == 0 else 2 * p * r / (p + r)
    return EvalResult(p, r, f, tuple(sorted(matched)), tuple(notes))


# --- synthetic logs ---------------------------------------------------------

DRIFT_KINDS = ("remove", "swap", "loop")


@dataclass
class _Model:
    """A sequential process with optional steps and one concurrent pair.

    Start and end activities are always executed; a fixed set of optional
    steps runs with probability 0.5; the activities in the concurrent pair
    occur in random order.
    """

    steps: list[str]
    optional: set[str]
    concurrent: tuple[str, str] | None
    loop: tuple[str, str] | None = None

    def sample(self, rng: np.random.Generator) -> list[str]:
        seq = []
        for a in self.steps:
            if a in self.optional and rng.random() < 0.5:
                continue
            seq.append(a)
        if self.concurrent:
            a, b = self.concurrent
            if a in seq and b in seq and rng.random() < 0.5:
                i, k = seq.index(a), seq.index(b)
                seq[i], seq[k] = seq[k], seq[i]
        if self.loop:
            a, b = self.loop
            if a in seq and b in seq:
                i, k = seq.index(a), seq.index(b)
                lo, hi = min(i, k), max(i, k)
                body = seq[lo: hi + 1]
                seq[hi + 1: hi + 1] = body * int(rng.integers(1, 3))
        return seq


def _base_model(alphabet: Sequence[str]) -> _Model:
    steps = list(alphabet)
    inner = steps[1:-1]
    optional = {a for k, a in enumerate(inner) if k % 3 == 2}
    firm = [a for a in inner if a not in optional]
    concurrent = (firm[-2], firm[-1]) if len(firm) >= 4 else None
    return _Model(steps, optional, concurrent)


def _firm(model: _Model) -> list[str]:
    """Inner activities that always occur and are not concurrent."""
    skip = set(model.optional) | set(model.concurrent or ())
    return [a for a in model.steps[1:-1] if a not in skip]


def _apply(model: _Model, change) -> None:
    kind, *args = change if isinstance(change, (tuple, list)) else (change,)
    firm = _firm(model)
    if kind == "remove":
        target = args[0] if args else firm[0]
        model.steps = [a for a in model.steps if a != target]
        if model.concurrent and target in model.concurrent:
            model.concurrent = None
    elif kind == "swap":
        if args:
            a, b = args
        elif model.loop:
            # swapping inside the loop body would barely change behaviour
            free = [x for x in firm if x not in model.loop]
            a, b = free[-1], model.loop[0]
        else:
            a, b = firm[1], firm[2]
        i, k = model.steps.index(a), model.steps.index(b)
        model.steps[i], model.steps[k] = b, a
    elif kind == "loop":
        model.loop = tuple(args) if args else (firm[-2], firm[-1])
    else:
        raise ValueError(f"unknown drift kind {kind!r}; expected one of {DRIFT_KINDS}")


def default_alphabet(n: int = 10) -> list[str]:
    return [f"act_{chr(ord('a') + k)}" for k in range(n)]


def generate_drifting_log(n_traces: int, alphabet: Sequence[str] | None = None,
                          drift_spec: Sequence[tuple[int, object]] = (),
                          seed: int = 0,
                          start: datetime | None = None) -> tuple[EventLog, GroundTruth]:
    """Sample traces from a base model, switching behaviour at each drift.

    ``drift_spec`` holds ``(position, change)`` with position the number of
    traces before the drift and change one of "remove", "swap", "loop"
    (optionally as a tuple naming the activities). Changes accumulate.
    Trace timestamps are one hour apart and strictly increasing.
    """
    if n_traces < 1:
        raise ValueError("n_traces must be positive")
    alphabet = list(alphabet or default_alphabet())
    if len(alphabet) < 8:
        raise ValueError("the generator needs at least 8 activities")
    positions = [p for p, _ in drift_spec]
    if any(not 0 < p < n_traces for p in positions):
        raise ValueError(f"drift positions must lie strictly inside 0..{n_traces}")
    if any(b <= a for a, b in zip(positions, positions[1:])):
        raise ValueError("drift positions must be strictly increasing")
    rng = np.random.default_rng(seed)
    start = start or datetime(2020, 1, 1, tzinfo=timezone.utc)
    model = _base_model(alphabet)
    pending = list(drift_spec)
    traces = []
    for k in range(n_traces):
        while pending and pending[0][0] == k:
            _apply(model, pending.pop(0)[1])
        traces.append(Trace(tuple(model.sample(rng)), start + timedelta(hours=k), f"case_{k:06d}"))
    return EventLog(tuple(traces)), GroundTruth(tuple(positions), "trace")
