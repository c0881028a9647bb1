from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from driftscope.errors import EmptyLogError, LogParseError, SchemaError, WindowConfigError
from driftscope.log_ingest import (EventLog, Trace, WindowSpec, dropped_tail, parse_csv,
                                   parse_timestamp, parse_xes, sort_by_first_timestamp,
                                   to_csv_text, window_count, windows, write_csv)

T0 = datetime(2021, 3, 1, tzinfo=timezone.utc)


def _log(n):
    return EventLog(tuple(Trace(("a",), T0 + timedelta(hours=k), f"c{k}") for k in range(n)))


def test_csv_single_case(tmp_path):
    p = tmp_path / "log.csv"
    p.write_text("case_id,activity,timestamp\n"
                 "c1,a,2021-01-01T10:00:00Z\n"
                 "c1,b,2021-01-01T11:00:00Z\n")
    log = parse_csv(p)
    assert len(log) == 1
    assert log.traces[0].activities == ("a", "b")
    assert log.traces[0].first_timestamp == datetime(2021, 1, 1, 10, tzinfo=timezone.utc)


def test_csv_groups_interleaved_cases(tmp_path):
    p = tmp_path / "log.csv"
    p.write_text("case_id,activity,timestamp\n"
                 "c2,b,1000\n"
                 "c1,a,2000\n"
                 "c2,a,3000\n")
    log = parse_csv(p)
    assert {t.case_id: t.activities for t in log} == {"c2": ("b", "a"), "c1": ("a",)}
    # file order of first appearance, not sorted
    assert [t.case_id for t in log] == ["c2", "c1"]


def test_csv_orders_events_by_time_then_file_order(tmp_path):
    p = tmp_path / "log.csv"
    p.write_text("case,act,ts\n"
                 "x,late,2021-01-01T12:00:00+00:00\n"
                 "x,tie1,2021-01-01T10:00:00+00:00\n"
                 "x,tie2,2021-01-01T10:00:00+00:00\n")
    log = parse_csv(p, {"case": "case", "activity": "act", "timestamp": "ts"})
    assert log.traces[0].activities == ("tie1", "tie2", "late")


def test_csv_missing_column(tmp_path):
    p = tmp_path / "log.csv"
    p.write_text("case_id,timestamp\nc1,1000\n")
    with pytest.raises(SchemaError, match="activity"):
        parse_csv(p)


def test_csv_bad_timestamp_reports_line(tmp_path):
    p = tmp_path / "log.csv"
    p.write_text("case_id,activity,timestamp\nc1,a,1000\nc1,b,yesterday\n")
    with pytest.raises(LogParseError) as info:
        parse_csv(p)
    assert info.value.line == 3


@pytest.mark.parametrize("text", ["", "case_id,activity,timestamp\n"])
def test_csv_empty(tmp_path, text):
    p = tmp_path / "log.csv"
    p.write_text(text)
    with pytest.raises(EmptyLogError):
        parse_csv(p)


def test_parse_timestamp_forms():
    assert parse_timestamp("0") == datetime(1970, 1, 1, tzinfo=timezone.utc)
    assert parse_timestamp("2020-05-01T02:00:00+02:00") == datetime(2020, 5, 1, tzinfo=timezone.utc)
    assert parse_timestamp("2020-05-01T00:00:00") == datetime(2020, 5, 1, tzinfo=timezone.utc)


XES = """<?xml version="1.0" encoding="UTF-8"?>
<log xes.version="1.0" xmlns="http://www.xes-standard.org/">
  <extension name="Concept" prefix="concept" uri="http://www.xes-standard.org/concept.xesext"/>
  <global scope="event"><string key="concept:name" value="__INVALID__"/></global>
  {traces}
</log>
"""


def _xes_trace(case, events):
    ev = "".join(
        f'<event><string key="concept:name" value="{a}"/>'
        f'<string key="lifecycle:transition" value="complete"/>'
        f'<date key="time:timestamp" value="{ts}"/><int key="cost" value="3"/></event>'
        for a, ts in events)
    return f'<trace><string key="concept:name" value="{case}"/>{ev}</trace>'


def test_xes_minimal(tmp_path):
    p = tmp_path / "l.xes"
    p.write_text(XES.format(traces=_xes_trace("1", [("a", "2020-01-01T00:00:00.000+01:00"),
                                                    ("b", "2020-01-01T01:00:00.000+01:00"),
                                                    ("c", "2020-01-01T02:00:00.000+01:00")])))
    log = parse_xes(p)
    assert len(log) == 1
    assert log.traces[0].activities == ("a", "b", "c")
    assert log.traces[0].first_timestamp == datetime(2019, 12, 31, 23, tzinfo=timezone.utc)


def test_xes_keeps_document_order(tmp_path):
    p = tmp_path / "l.xes"
    traces = [_xes_trace("late", [("x", "2020-03-01T00:00:00Z")]),
              _xes_trace("early", [("y", "2020-01-01T00:00:00Z")]),
              _xes_trace("mid", [("z", "2020-02-01T00:00:00Z"), ("x", "2020-02-02T00:00:00Z")])]
    p.write_text(XES.format(traces="".join(traces)))
    log = parse_xes(p)
    assert [t.case_id for t in log] == ["late", "early", "mid"]
    assert [t.case_id for t in sort_by_first_timestamp(log)] == ["early", "mid", "late"]


def test_xes_truncated(tmp_path):
    p = tmp_path / "l.xes"
    full = XES.format(traces=_xes_trace("1", [("a", "2020-01-01T00:00:00Z")]))
    p.write_text(full[: len(full) // 2])
    with pytest.raises(LogParseError) as info:
        parse_xes(p)
    assert info.value.offset is not None and 0 < info.value.offset <= len(full)


def test_xes_event_without_name(tmp_path):
    p = tmp_path / "l.xes"
    p.write_text(XES.format(traces='<trace><event><date key="time:timestamp" '
                                   'value="2020-01-01T00:00:00Z"/></event></trace>'))
    with pytest.raises(LogParseError, match="concept:name"):
        parse_xes(p)


def test_sort_is_stable():
    t = [Trace(("a",), T0 + timedelta(hours=h), c) for h, c in [(3, "x"), (1, "y"), (2, "z"), (1, "w")]]
    out = sort_by_first_timestamp(EventLog(tuple(t)))
    assert [x.case_id for x in out] == ["y", "w", "z", "x"]
    assert sort_by_first_timestamp(out) == out


def test_window_count_large_log():
    assert window_count(150370, WindowSpec(5000, 2500)) == 57


def test_window_count_small():
    assert window_count(10, WindowSpec(4, 2)) == 2
    with pytest.raises(WindowConfigError):
        window_count(10, WindowSpec(8, 4))
    with pytest.raises(WindowConfigError):
        window_count(10, WindowSpec(10, 10))


def test_window_spec_rejects_step_larger_than_size():
    with pytest.raises(WindowConfigError):
        WindowSpec(2, 3)
    with pytest.raises(WindowConfigError):
        WindowSpec(0, 0)


def test_windows_cover_expected_indices():
    log = _log(10)
    ws = windows(log, WindowSpec(4, 2))
    assert [[int(t.case_id[1:]) + 1 for t in w.traces] for w in ws] == [[1, 2, 3, 4], [3, 4, 5, 6]]
    assert [w.index for w in ws] == [1, 2]
    assert ws[0].start_time == T0 and ws[0].end_time == T0 + timedelta(hours=3)


def test_tumbling_window():
    ws = windows(_log(15), WindowSpec(5, 5))
    assert len(ws) == 1
    assert [t.case_id for t in ws[0].traces] == [f"c{k}" for k in range(5)]
    assert not WindowSpec(5, 5).sliding


def test_dropped_tail_large_log():
    assert dropped_tail(150370, WindowSpec(5000, 2500)) == 150370 - (56 * 2500 + 5000)


@given(n=st.integers(2, 400), size=st.integers(1, 60), step=st.integers(1, 60))
def test_window_count_equals_number_of_windows(n, size, step):
    if step > size or size > n:
        return
    spec = WindowSpec(size, step)
    if (n - size - step) // step < 1:
        with pytest.raises(WindowConfigError):
            window_count(n, spec)
        return
    ws = windows(_log(n), spec)
    assert len(ws) == window_count(n, spec)
    assert all(len(w) == size for w in ws)
    for a, b in zip(ws, ws[1:]):
        assert len(set(a.traces) & set(b.traces)) == max(size - step, 0)


activity = st.text(alphabet="abcxyz ,\"'", min_size=1, max_size=4)


@settings(max_examples=60)
@given(st.lists(st.tuples(st.lists(activity, min_size=1, max_size=5), st.integers(0, 10 ** 9)),
                min_size=1, max_size=8))
def test_csv_round_trip(tmp_path_factory, spec):
    traces = tuple(
        Trace(tuple(acts), T0 + timedelta(seconds=sec, microseconds=k), f"case {k}")
        for k, (acts, sec) in enumerate(spec))
    log = EventLog(traces)
    p = tmp_path_factory.mktemp("rt") / "log.csv"
    write_csv(log, p)
    assert parse_csv(p) == log
    assert to_csv_text(parse_csv(p)) == p.read_text()
