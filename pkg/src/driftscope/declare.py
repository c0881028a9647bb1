"""Declare templates, constraint space generation and support/confidence."""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np


class Template(enum.Enum):
    # definition order is the canonical constraint-space order
    AtMostOne = "AtMostOne"
    Response = "Response"
    AlternateResponse = "AlternateResponse"
    ChainResponse = "ChainResponse"
    Precedence = "Precedence"
    AlternatePrecedence = "AlternatePrecedence"
    ChainPrecedence = "ChainPrecedence"
    NotSuccession = "NotSuccession"

    @property
    def arity(self) -> int:
        return 1 if self is Template.AtMostOne else 2

    @property
    def activation_index(self) -> int:
        """Which parameter triggers the constraint (0 = first, 1 = second)."""
        return 1 if self in _PRECEDENCE_FAMILY else 0


_PRECEDENCE_FAMILY = {Template.Precedence, Template.AlternatePrecedence, Template.ChainPrecedence}

DEFAULT_REPERTOIRE: tuple[Template, ...] = tuple(Template)

# strongest first
SUBSUMPTION_CHAINS = (
    (Template.ChainResponse, Template.AlternateResponse, Template.Response),
    (Template.ChainPrecedence, Template.AlternatePrecedence, Template.Precedence),
)


@dataclass(frozen=True)
class Constraint:
    template: Template
    params: tuple[str, ...]

    def __post_init__(self):
        if len(self.params) != self.template.arity:
            raise ValueError(f"{self.template.value} takes {self.template.arity} activities")
        if self.template.arity == 2 and self.params[0] == self.params[1]:
            raise ValueError("binary constraints need two distinct activities")

    @property
    def activation(self) -> str:
        return self.params[self.template.activation_index]

    def __str__(self):
        return f"{self.template.value}({', '.join(self.params)})"

    @classmethod
    def parse(cls, text: str) -> "Constraint":
        name, _, rest = text.partition("(")
        params = tuple(p.strip() for p in rest.rstrip(")").split(","))
        return cls(Template(name.strip()), params)


@dataclass(frozen=True)
class ActivationStats:
    activations: int
    satisfied: int
    activating_traces: int
    total_traces: int

    @property
    def support(self) -> float:
        return self.satisfied / self.activations if self.activations else 0.0

    @property
    def confidence(self) -> float:
        if not self.activations:
            return 0.0
        # the trace fraction is formed first so confidence never rounds above support
        return self.support * (self.activating_traces / self.total_traces)


def constraint_space(alphabet: Iterable[str],
                     repertoire: Iterable[Template] = DEFAULT_REPERTOIRE) -> list[Constraint]:
    acts = sorted(set(alphabet))
    if not acts:
        raise ValueError("empty alphabet")
    chosen = set(repertoire)
    out = []
    for tpl in Template:
        if tpl not in chosen:
            continue
        if tpl.arity == 1:
            out.extend(Constraint(tpl, (a,)) for a in acts)
        else:
            out.extend(Constraint(tpl, pair) for pair in permutations(acts, 2))
    return out


def evaluate_trace(c: Constraint, trace: Sequence[str]) -> tuple[int, int, bool]:
    """Return ``(activations, satisfied, has_activation)`` of `c` on one trace."""
    tpl = c.template
    if tpl is Template.AtMostOne:
        k = sum(1 for x in trace if x == c.params[0])
        return k, int(k == 1), k > 0

    a, b = c.params
    acts = sat = 0
    if tpl is Template.Response:
        # walk backwards remembering whether a b lies ahead
        seen_b = False
        for x in reversed(trace):
            if x == b:
                seen_b = True
            elif x == a:
                acts += 1
                sat += seen_b
    elif tpl is Template.AlternateResponse:
        pending = False
        for x in trace:
            if x == a:
                if pending:
                    acts += 1  # previous a recurred before any b
                pending = True
            elif x == b and pending:
                acts += 1
                sat += 1
                pending = False
        acts += pending
    elif tpl is Template.ChainResponse:
        for i, x in enumerate(trace):
            if x == a:
                acts += 1
                sat += i + 1 < len(trace) and trace[i + 1] == b
    elif tpl is Template.Precedence:
        seen_a = False
        for x in trace:
            if x == a:
                seen_a = True
            elif x == b:
                acts += 1
                sat += seen_a
    elif tpl is Template.AlternatePrecedence:
        # satisfied iff the latest a comes after the latest earlier b
        open_a = False
        for x in trace:
            if x == a:
                open_a = True
            elif x == b:
                acts += 1
                sat += open_a
                open_a = False
    elif tpl is Template.ChainPrecedence:
        for i, x in enumerate(trace):
            if x == b:
                acts += 1
                sat += i > 0 and trace[i - 1] == a
    elif tpl is Template.NotSuccession:
        seen_b = False
        for x in reversed(trace):
            if x == b:
                seen_b = True
            elif x == a:
                acts += 1
                sat += not seen_b
    else:  # pragma: no cover
        raise ValueError(tpl)
    return acts, sat, acts > 0


def _stats(c: Constraint, traces: Iterable[Sequence[str]]) -> ActivationStats:
    acts = sat = hit = total = 0
    for variant, mult in Counter(tuple(t) for t in traces).items():
        x, y, z = evaluate_trace(c, variant)
        acts += mult * x
        sat += mult * y
        hit += mult * z
        total += mult
    return ActivationStats(acts, sat, hit, total)


def _sequences(sublog) -> list[Sequence[str]]:
    return [getattr(t, "activities", t) for t in sublog]


def activation_stats(c: Constraint, sublog) -> ActivationStats:
    """Aggregate activation statistics over the trace instances of `sublog`.

    `sublog` may be a SubLog/EventLog or a plain iterable of activity sequences.
    """
    return _stats(c, _sequences(getattr(sublog, "traces", sublog)))


def support(c: Constraint, sublog) -> float:
    return activation_stats(c, sublog).support


def confidence(c: Constraint, sublog) -> float:
    return activation_stats(c, sublog).confidence


def trace_stat_arrays(constraints: Sequence[Constraint], trace: Sequence[str]) -> np.ndarray:
    """Per-constraint ``(activations, satisfied, has_activation)`` as a 3 x n int array."""
    present = set(trace)
    out = np.zeros((3, len(constraints)), dtype=np.int64)
    for i, c in enumerate(constraints):
        if c.activation in present:
            out[:, i] = evaluate_trace(c, trace)
    return out


def subsumption_reduce(items: Sequence[tuple[Constraint, Sequence[float]]],
                       epsilon: float = 0.01) -> list[tuple[Constraint, Sequence[float]]]:
    """Drop constraints implied by a stronger one with matching confidence.

    Within ChainResponse < AlternateResponse < Response (and the Precedence
    counterpart) on the same activities, the weaker constraint is removed
    when some stronger one present in `items` stays within `epsilon` of it
    at every window.
    """
    lengths = {len(s) for _, s in items}
    if len(lengths) > 1:
        raise ValueError(f"series of unequal lengths: {sorted(lengths)}")
    rank = {}
    for chain in SUBSUMPTION_CHAINS:
        for r, tpl in enumerate(chain):
            rank[tpl] = (chain, r)
    series = {c: np.asarray(s, dtype=float) for c, s in items}

    def implied(c: Constraint) -> bool:
        if c.template not in rank:
            return False
        chain, r = rank[c.template]
        for stronger in chain[:r]:
            other = series.get(Constraint(stronger, c.params))
            if other is not None and np.all(np.abs(other - series[c]) <= epsilon):
                return True
        return False

    return [(c, s) for c, s in items if not implied(c)]
