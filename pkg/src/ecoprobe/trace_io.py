"""Parsing and serialization of the two wire formats: sensor traces and interaction logs.

Trace CSV: header ``ts,kind,lat,lon,acc,speed,activity,confidence`` where
``kind`` is ``loc`` or ``motion`` and columns unused by a kind stay empty.
Interaction log CSV: header ``ts,event`` with a closed tag set.
Both use ``\\n`` newlines, UTF-8, and no quoting (values never contain commas).
Lines starting with ``#`` are comments and are ignored by both parsers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .model import Activity, GeoPoint, LocationSample, MotionSample, TraceRecord

TRACE_HEADER = "ts,kind,lat,lon,acc,speed,activity,confidence"
LOG_HEADER = "ts,event"


class ParseError(ValueError):
    """Input file is unusable: missing header or no valid records."""


class EventTag(str, Enum):
    """The closed set of interaction-log tags."""

    FOREGROUND = "foreground"
    BACKGROUND = "background"
    TAB_TRIPS = "tab:trips"
    TAB_CARBON = "tab:carbon"
    TAB_COST = "tab:cost"
    TAB_INFO = "tab:info"
    TAB_LOG = "tab:log"


_TAGS = {tag.value: tag for tag in EventTag}


@dataclass(frozen=True)
class InteractionEvent:
    """One line of the research log: Unix-ms timestamp plus a UI event tag."""

    ts: int
    event: EventTag

    def __post_init__(self) -> None:
        if not isinstance(self.ts, int) or self.ts <= 0:
            raise ValueError(f"ts must be a positive Unix-ms integer, got {self.ts!r}")
        if not isinstance(self.event, EventTag):
            raise ValueError(f"unknown event tag: {self.event!r}")


@dataclass(frozen=True)
class TraceFile:
    """Time-ordered sensor records (non-decreasing ts; ties keep input order)."""

    records: tuple[TraceRecord, ...]


def _lines(text: str) -> list[str]:
    return [line.rstrip("\r") for line in text.split("\n")]


def _parse_ts(field: str) -> int:
    ts = int(field)
    if ts <= 0:
        raise ValueError("non-positive ts")
    return ts


def _parse_trace_line(fields: list[str]) -> TraceRecord:
    if len(fields) != 8:
        raise ValueError("wrong column count")
    ts = _parse_ts(fields[0])
    kind = fields[1]
    if kind == "loc":
        point = GeoPoint(float(fields[2]), float(fields[3]))
        speed = None if fields[5] == "" else float(fields[5])
        payload: LocationSample | MotionSample = LocationSample(
            point=point, horizontal_accuracy_m=float(fields[4]), speed_mps=speed
        )
    elif kind == "motion":
        payload = MotionSample(
            activity=Activity(fields[6]), confidence=float(fields[7])
        )
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return TraceRecord(ts=ts, payload=payload)


def parse_trace(text: str) -> tuple[TraceFile, int]:
    """Parse a trace CSV into records sorted stably by ts.

    Per-line malformations are skipped and counted (field logs from real
    phones contain truncation); a missing header or zero valid records is a
    hard ParseError. Returns (trace, skipped_line_count).
    """
    lines = _lines(text)
    data_lines, header_seen = [], False
    for line in lines:
        if line == "" or line.startswith("#"):
            continue
        if not header_seen:
            if line.strip() != TRACE_HEADER:
                raise ParseError(f"missing trace header {TRACE_HEADER!r}")
            header_seen = True
            continue
        data_lines.append(line)
    if not header_seen:
        raise ParseError(f"missing trace header {TRACE_HEADER!r}")

    records, skipped = [], 0
    for line in data_lines:
        try:
            records.append(_parse_trace_line(line.split(",")))
        except (ValueError, KeyError):
            skipped += 1
    if not records:
        raise ParseError("no records")
    records.sort(key=lambda r: r.ts)  # stable: ties keep input order
    return TraceFile(records=tuple(records)), skipped


def _number(value: float) -> str:
    # repr round-trips floats exactly and keeps integral values short
    return repr(float(value))


def serialize_trace(trace: TraceFile, comment: str | None = None) -> str:
    """Canonical trace CSV; an optional comment line records provenance."""
    out = []
    if comment is not None:
        out.append(f"# {comment}")
    out.append(TRACE_HEADER)
    for rec in trace.records:
        p = rec.payload
        if isinstance(p, LocationSample):
            speed = "" if p.speed_mps is None else _number(p.speed_mps)
            out.append(
                f"{rec.ts},loc,{_number(p.point.lat)},{_number(p.point.lon)},"
                f"{_number(p.horizontal_accuracy_m)},{speed},,"
            )
        else:
            out.append(f"{rec.ts},motion,,,,,{p.activity.value},{_number(p.confidence)}")
    return "\n".join(out) + "\n"


def parse_interaction_log(text: str) -> tuple[list[InteractionEvent], int]:
    """Parse an interaction-log CSV, preserving file order.

    Unknown tags and malformed lines are rejected per line and counted;
    a missing header is a hard ParseError. Returns (events, skipped_count).
    """
    lines = _lines(text)
    data_lines, header_seen = [], False
    for line in lines:
        if line == "" or line.startswith("#"):
            continue
        if not header_seen:
            if line.strip() != LOG_HEADER:
                raise ParseError(f"missing log header {LOG_HEADER!r}")
            header_seen = True
            continue
        data_lines.append(line)
    if not header_seen:
        raise ParseError(f"missing log header {LOG_HEADER!r}")

    events, skipped = [], 0
    for line in data_lines:
        fields = line.split(",")
        try:
            if len(fields) != 2 or fields[1] not in _TAGS:
                raise ValueError("bad line")
            events.append(InteractionEvent(ts=_parse_ts(fields[0]), event=_TAGS[fields[1]]))
        except ValueError:
            skipped += 1
    return events, skipped


def serialize_interaction_log(events: Iterable[InteractionEvent]) -> str:
    """Canonical log CSV: header plus one ``ts,tag`` line per event."""
    out = [LOG_HEADER]
    out.extend(f"{ev.ts},{ev.event.value}" for ev in events)
    return "\n".join(out) + "\n"


def validate_event_tags(tags: Sequence[str]) -> list[int]:
    """Indexes of tags not in the closed set; empty means all valid."""
    return [i for i, tag in enumerate(tags) if tag not in _TAGS]
