from itertools import product

import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from driftscope.declare import (ActivationStats, Constraint, Template, activation_stats,
                                confidence, constraint_space, evaluate_trace, subsumption_reduce,
                                support)

T = Template


def holds_at(c: Constraint, t: str, i: int) -> bool:
    """Whether the activation at position i satisfies c, by explicit quantification."""
    n = len(t)
    tpl = c.template
    if tpl is T.AtMostOne:
        return all(t[j] != c.params[0] for j in range(n) if j != i)
    a, b = c.params
    if tpl is T.Response:
        return any(t[j] == b for j in range(i + 1, n))
    if tpl is T.AlternateResponse:
        return any(t[j] == b and all(t[k] != a for k in range(i + 1, j)) for j in range(i + 1, n))
    if tpl is T.ChainResponse:
        return i + 1 < n and t[i + 1] == b
    if tpl is T.Precedence:
        return any(t[j] == a for j in range(i))
    if tpl is T.AlternatePrecedence:
        return any(t[j] == a and all(t[k] != b for k in range(j + 1, i)) for j in range(i))
    if tpl is T.ChainPrecedence:
        return i > 0 and t[i - 1] == a
    if tpl is T.NotSuccession:
        return not any(t[j] == b for j in range(i + 1, n))
    raise AssertionError(tpl)


def activation_positions(c: Constraint, t: str) -> list[int]:
    if c.template is T.AtMostOne:
        trigger = c.params[0]
    elif c.template in (T.Precedence, T.AlternatePrecedence, T.ChainPrecedence):
        trigger = c.params[1]
    else:
        trigger = c.params[0]
    return [i for i, x in enumerate(t) if x == trigger]


def brute_force(c: Constraint, t: str) -> tuple[int, int]:
    acts = activation_positions(c, t)
    return len(acts), sum(holds_at(c, t, i) for i in acts)


def all_traces(alphabet="abc", max_len=6):
    for k in range(1, max_len + 1):
        for p in product(alphabet, repeat=k):
            yield "".join(p)


# (template, satisfying examples, violating examples), all with params (a, b)
TABLE_1 = [
    (T.AtMostOne, ["bcc", "bcac"], ["bcaac", "bcacaa"]),
    (T.Response, ["baabc", "bcc"], ["caac", "bacc"]),
    (T.AlternateResponse, ["cacb", "abcacb"], ["caacb", "bacacb"]),
    (T.ChainResponse, ["cabb", "abcab"], ["cacb", "bca"]),
    (T.Precedence, ["cacbb", "acc"], ["ccbb", "bacc"]),
    (T.AlternatePrecedence, ["cacba", "abcaacb"], ["cacbba", "abbabcb"]),
    (T.ChainPrecedence, ["abca", "abaabc"], ["bca", "baacb"]),
    (T.NotSuccession, ["bbcaa", "cbbca"], ["aacbb", "abb"]),
]


def satisfies(c, trace):
    acts, sat, _ = evaluate_trace(c, trace)
    return acts == sat


@pytest.mark.parametrize("tpl,good,bad", TABLE_1, ids=[r[0].value for r in TABLE_1])
def test_table_examples(tpl, good, bad):
    c = Constraint(tpl, ("a",) if tpl.arity == 1 else ("a", "b"))
    for t in good:
        assert satisfies(c, t), t
    for t in bad:
        assert not satisfies(c, t), t


def test_worked_trace_examples():
    assert evaluate_trace(Constraint(T.ChainPrecedence, ("b", "c")), "bcc") == (2, 1, True)
    assert evaluate_trace(Constraint(T.Response, ("a", "b")), "baabc") == (2, 2, True)
    assert evaluate_trace(Constraint(T.AlternateResponse, ("a", "b")), "caacb") == (2, 1, True)
    assert evaluate_trace(Constraint(T.NotSuccession, ("a", "b")), "abb") == (1, 0, True)
    assert evaluate_trace(Constraint(T.Response, ("a", "b")), "bcc") == (0, 0, False)


def test_at_most_one_counting():
    c = Constraint(T.AtMostOne, ("a",))
    assert evaluate_trace(c, "bcc") == (0, 0, False)
    assert evaluate_trace(c, "bac") == (1, 1, True)
    assert evaluate_trace(c, "abaca") == (3, 0, True)


@pytest.mark.parametrize("tpl", list(T), ids=[t.value for t in T])
def test_engine_matches_brute_force_short_traces(tpl):
    params = [("a",), ("b",), ("c",)] if tpl.arity == 1 else \
        [p for p in product("abc", repeat=2) if p[0] != p[1]]
    for t in all_traces(max_len=5):
        for p in params:
            c = Constraint(tpl, p)
            assert evaluate_trace(c, t)[:2] == brute_force(c, t), (c, t)


def test_support_and_confidence_worked_example(worked_log):
    resp = Constraint(T.Response, ("a", "b"))
    chp = Constraint(T.ChainPrecedence, ("b", "c"))
    assert support(resp, worked_log) == 0.8
    assert confidence(resp, worked_log) == pytest.approx(0.8 * 6 / 7, abs=1e-12)
    assert support(chp, worked_log) == 7 / 8
    assert confidence(chp, worked_log) == 0.875
    assert activation_stats(resp, worked_log) == ActivationStats(10, 8, 6, 7)


def test_vacuous_constraint_scores_zero(worked_log):
    c = Constraint(T.Response, ("x", "b"))
    assert support(c, worked_log) == 0
    assert confidence(c, worked_log) == 0


def test_constraint_space_sizes():
    assert len(constraint_space({"a", "b"})) == 16
    assert constraint_space({"a"}) == [Constraint(T.AtMostOne, ("a",))]
    assert len(constraint_space({"a", "b", "c"}, {T.Response})) == 6
    with pytest.raises(ValueError):
        constraint_space(set())


def test_constraint_space_order_and_text():
    space = constraint_space({"b", "a"})
    assert [str(c) for c in space[:4]] == ["AtMostOne(a)", "AtMostOne(b)", "Response(a, b)", "Response(b, a)"]
    assert space[-1].template is T.NotSuccession
    c = Constraint(T.AlternatePrecedence, ("Assign seriousness", "Create SW anomaly"))
    assert str(c) == "AlternatePrecedence(Assign seriousness, Create SW anomaly)"
    assert Constraint.parse(str(c)) == c


def test_activation_roles():
    assert Constraint(T.Response, ("a", "b")).activation == "a"
    assert Constraint(T.NotSuccession, ("a", "b")).activation == "a"
    assert Constraint(T.Precedence, ("a", "b")).activation == "b"
    assert Constraint(T.ChainPrecedence, ("b", "c")).activation == "c"
    with pytest.raises(ValueError):
        Constraint(T.Response, ("a", "a"))


traces = st.lists(st.text(alphabet="abc", min_size=1, max_size=8), min_size=1, max_size=6)
binary = st.sampled_from([t for t in T if t.arity == 2])
pairs = st.sampled_from([p for p in product("abc", repeat=2) if p[0] != p[1]])


@given(traces, binary, pairs)
@example(["a", "a", "a", "aa", "aaaba"], T.Precedence, ("b", "a"))  # support 1/9, all traces activate
def test_confidence_bounded_by_support(log, tpl, p):
    c = Constraint(tpl, p)
    s, conf = support(c, log), confidence(c, log)
    assert 0 <= conf <= s <= 1


@given(traces, binary, pairs)
def test_multiset_linearity(log, tpl, p):
    c = Constraint(tpl, p)
    one, two = activation_stats(c, log), activation_stats(c, log + log)
    assert (two.activations, two.satisfied, two.activating_traces, two.total_traces) == \
        (2 * one.activations, 2 * one.satisfied, 2 * one.activating_traces, 2 * one.total_traces)


CHAINS = [(T.ChainResponse, T.AlternateResponse, T.Response),
          (T.ChainPrecedence, T.AlternatePrecedence, T.Precedence)]


def test_chain_implication_per_activation():
    """Per activation: chain satisfied => alternate satisfied => plain satisfied."""
    for t in all_traces(max_len=6):
        for p in [q for q in product("abc", repeat=2) if q[0] != q[1]]:
            for chain in CHAINS:
                cs = [Constraint(x, p) for x in chain]
                for i in activation_positions(cs[0], t):
                    flags = [holds_at(c, t, i) for c in cs]
                    assert flags[0] <= flags[1] <= flags[2], (t, p, i)
                sats = [evaluate_trace(c, t)[1] for c in cs]
                assert sats[0] <= sats[1] <= sats[2]


def test_subsumption_drops_weaker_on_equal_series():
    s = [0.2, 0.5, 0.9]
    resp, chain = Constraint(T.Response, ("a", "b")), Constraint(T.ChainResponse, ("a", "b"))
    out = subsumption_reduce([(resp, s), (chain, s)], epsilon=0)
    assert [c for c, _ in out] == [chain]


def test_subsumption_keeps_differing_series():
    resp, alt = Constraint(T.Response, ("a", "b")), Constraint(T.AlternateResponse, ("a", "b"))
    items = [(resp, [0.2, 0.8, 0.9]), (alt, [0.2, 0.5, 0.9])]
    assert subsumption_reduce(items, epsilon=0.01) == items


def test_subsumption_leaves_unrelated_and_preserves_order():
    items = [(Constraint(T.Response, ("a", "b")), [1.0, 1.0]),
             (Constraint(T.ChainResponse, ("b", "a")), [1.0, 1.0]),
             (Constraint(T.Precedence, ("a", "b")), [1.0, 1.0]),
             (Constraint(T.AtMostOne, ("a",)), [1.0, 1.0])]
    assert subsumption_reduce(items) == items
    prec_chain = (Constraint(T.ChainPrecedence, ("a", "b")), np.array([1.0, 1.0]))
    out = subsumption_reduce(items + [prec_chain])
    assert [str(c) for c, _ in out] == ["Response(a, b)", "ChainResponse(b, a)", "AtMostOne(a)",
                                        "ChainPrecedence(a, b)"]


def test_subsumption_rejects_ragged():
    with pytest.raises(ValueError):
        subsumption_reduce([(Constraint(T.Response, ("a", "b")), [1.0]),
                            (Constraint(T.ChainResponse, ("a", "b")), [1.0, 0.0])])
