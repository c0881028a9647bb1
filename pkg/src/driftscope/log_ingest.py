"""Event log ingestion (CSV, XES) and sliding-window slicing."""
from __future__ import annotations

import csv
import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Sequence

from .errors import EmptyLogError, LogParseError, SchemaError, WindowConfigError

DEFAULT_COLUMNS = {"case": "case_id", "activity": "activity", "timestamp": "timestamp"}

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class Trace:
    activities: tuple[str, ...]
    first_timestamp: datetime
    case_id: str = ""

    def __post_init__(self):
        if not self.activities:
            raise ValueError(f"trace {self.case_id!r} has no events")

    def __len__(self):
        return len(self.activities)


@dataclass(frozen=True)
class EventLog:
    """A multiset of traces. Duplicates are stored as separate instances."""

    traces: tuple[Trace, ...]

    def __len__(self):
        return len(self.traces)

    def __iter__(self):
        return iter(self.traces)

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset(a for t in self.traces for a in t.activities)

    @classmethod
    def from_variants(cls, variants: Iterable[tuple[str | Sequence[str], int]],
                      start: datetime | None = None) -> "EventLog":
        """Build a log from ``(activities, multiplicity)`` pairs.

        Single-character activity names may be given as a plain string, so
        ``("baabc", 4)`` yields four traces <b, a, a, b, c>.
        """
        start = start or datetime(2020, 1, 1, tzinfo=timezone.utc)
        traces = []
        for acts, mult in variants:
            for _ in range(mult):
                k = len(traces)
                traces.append(Trace(tuple(acts), start + timedelta(minutes=k), f"case{k}"))
        return cls(tuple(traces))


@dataclass(frozen=True)
class WindowSpec:
    win_size: int
    win_step: int

    def __post_init__(self):
        if self.win_step < 1 or self.win_size < 1:
            raise WindowConfigError("window size and step must be positive")
        if self.win_step > self.win_size:
            raise WindowConfigError(
                f"window step {self.win_step} exceeds window size {self.win_size}")

    @property
    def sliding(self) -> bool:
        return self.win_step < self.win_size

    @classmethod
    def auto(cls, log_size: int) -> "WindowSpec":
        """Recommended setting of about 60 windows: step = |L|/61, size = 2 step."""
        step = max(1, log_size // 61)
        return cls(2 * step, step)


@dataclass(frozen=True)
class SubLog:
    index: int  # 1-based
    traces: tuple[Trace, ...]
    start_time: datetime
    end_time: datetime

    def __len__(self):
        return len(self.traces)


def parse_timestamp(text: str) -> datetime:
    """Parse an RFC 3339 timestamp or integer epoch milliseconds into UTC."""
    text = text.strip()
    if not text:
        raise ValueError("empty timestamp")
    if text.lstrip("-").isdigit():
        return _EPOCH + timedelta(milliseconds=int(text))
    if text[-1] in "zZ":
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def _build_log(cases: dict[str, list[tuple[datetime, int, str]]]) -> EventLog:
    traces = []
    for case_id, events in cases.items():
        # ties on timestamp keep file order via the sequence number
        events.sort(key=lambda e: (e[0], e[1]))
        traces.append(Trace(tuple(e[2] for e in events), events[0][0], case_id))
    return EventLog(tuple(traces))


def parse_csv(path, column_map: dict[str, str] | None = None) -> EventLog:
    """Read a CSV event log, one trace per distinct case id.

    Traces appear in order of the first row of each case; they are not
    sorted across cases.
    """
    cols = {**DEFAULT_COLUMNS, **(column_map or {})}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise EmptyLogError(f"{path}: empty file")
        for role in ("case", "activity", "timestamp"):
            if cols[role] not in reader.fieldnames:
                raise SchemaError(f"{path}: missing {role} column {cols[role]!r}")
        cases: dict[str, list[tuple[datetime, int, str]]] = {}
        for seq, row in enumerate(reader):
            line = reader.line_num
            try:
                ts = parse_timestamp(row[cols["timestamp"]] or "")
            except ValueError as exc:
                raise LogParseError(f"{path}:{line}: bad timestamp: {exc}", line=line) from None
            activity = row[cols["activity"]]
            if not activity:
                raise LogParseError(f"{path}:{line}: empty activity", line=line)
            cases.setdefault(row[cols["case"]], []).append((ts, seq, activity))
    if not cases:
        raise EmptyLogError(f"{path}: no events")
    return _build_log(cases)


def write_csv(log: EventLog, path) -> None:
    """Write the canonical CSV form (event k of a trace at first timestamp + k ms)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(to_csv_text(log))


def to_csv_text(log: EventLog) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case_id", "activity", "timestamp"])
    for t in log.traces:
        for k, a in enumerate(t.activities):
            w.writerow([t.case_id, a, format_timestamp(t.first_timestamp + timedelta(milliseconds=k))])
    return buf.getvalue()


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _byte_offset(data: bytes, line: int, column: int) -> int:
    lines = data.split(b"\n")
    return sum(len(x) + 1 for x in lines[: line - 1]) + column


def parse_xes(path) -> EventLog:
    """Read the minimal XES subset: concept:name and time:timestamp.

    Lifecycle transitions and other attributes are ignored, so every event
    counts as one activity occurrence.
    """
    data = Path(path).read_bytes()
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, col = exc.position
        off = _byte_offset(data, line, col)
        raise LogParseError(f"{path}: malformed XML at byte {off}: {exc}", offset=off) from None

    cases: dict[str, list[tuple[datetime, int, str]]] = {}
    for t_no, trace in enumerate(el for el in root if _local(el.tag) == "trace"):
        case_id = None
        events = []
        for child in trace:
            tag = _local(child.tag)
            if tag == "string" and child.get("key") == "concept:name":
                case_id = child.get("value")
            elif tag == "event":
                name = ts = None
                for attr in child:
                    key = attr.get("key")
                    if key == "concept:name":
                        name = attr.get("value")
                    elif key == "time:timestamp":
                        ts = attr.get("value")
                where = f"{path}: trace {t_no + 1}, event {len(events) + 1}"
                if not name:
                    raise LogParseError(f"{where}: missing concept:name")
                if ts is None:
                    raise LogParseError(f"{where}: missing time:timestamp")
                try:
                    events.append((parse_timestamp(ts), len(events), name))
                except ValueError as exc:
                    raise LogParseError(f"{where}: bad timestamp: {exc}") from None
        if not events:
            continue
        key = case_id if case_id is not None else f"trace{t_no + 1}"
        while key in cases:
            key += "'"
        cases[key] = events
    if not cases:
        raise EmptyLogError(f"{path}: no traces with events")
    return _build_log(cases)


def read_log(path, fmt: str | None = None, column_map: dict[str, str] | None = None) -> EventLog:
    fmt = fmt or ("xes" if str(path).lower().endswith(".xes") else "csv")
    if fmt == "xes":
        return parse_xes(path)
    if fmt == "csv":
        return parse_csv(path, column_map)
    raise ValueError(f"unknown log format {fmt!r}")


def sort_by_first_timestamp(log: EventLog) -> EventLog:
    return EventLog(tuple(sorted(log.traces, key=lambda t: t.first_timestamp)))


def window_count(log_size: int, spec: WindowSpec) -> int:
    """Number of sub-logs, floor((|L| - size - step) / step).

    The formula leaves the trailing traces after the last window unused.
    """
    if spec.win_size > log_size:
        raise WindowConfigError(
            f"window size {spec.win_size} exceeds log size {log_size}")
    n = (log_size - spec.win_size - spec.win_step) // spec.win_step
    if n < 1:
        raise WindowConfigError(
            f"log of {log_size} traces yields {n} windows with size={spec.win_size}, "
            f"step={spec.win_step}; use a smaller window size or step")
    return n


def windows(log: EventLog, spec: WindowSpec) -> list[SubLog]:
    n = window_count(len(log), spec)
    out = []
    for j in range(1, n + 1):
        lo = (j - 1) * spec.win_step
        chunk = log.traces[lo: lo + spec.win_size]
        out.append(SubLog(j, chunk, chunk[0].first_timestamp, chunk[-1].first_timestamp))
    return out


def dropped_tail(log_size: int, spec: WindowSpec) -> int:
    """Traces after the end of the last window."""
    n = window_count(log_size, spec)
    return log_size - ((n - 1) * spec.win_step + spec.win_size)
