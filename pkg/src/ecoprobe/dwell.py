"""Dwell-time sessionization of interaction logs and display-order regrouping."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .trace_io import EventTag, InteractionEvent

TABS = ("trips", "carbon", "cost", "info", "log")

_TAB_OF_TAG = {
    EventTag.TAB_TRIPS: "trips",
    EventTag.TAB_CARBON: "carbon",
    EventTag.TAB_COST: "cost",
    EventTag.TAB_INFO: "info",
    EventTag.TAB_LOG: "log",
}


@dataclass
class DwellReport:
    """Per-tab focus time plus session bookkeeping, all in milliseconds."""

    dwell_ms: dict[str, int] = field(default_factory=lambda: {tab: 0 for tab in TABS})
    session_count: int = 0
    total_foreground_ms: int = 0


def compute_dwell(events: Sequence[InteractionEvent]) -> DwellReport:
    """Accumulate per-tab dwell from a time-ordered interaction log.

    A session opens at a foreground event with implicit focus on the trips
    tab (the default tab). A focus interval ends at the next tab event, at
    background, or at a repeated foreground, which closes the previous
    session (crash recovery leaves unclosed sessions in real logs). Events
    arriving outside a session are ignored, and time spent backgrounded
    accrues to no tab. A trailing unclosed focus interval contributes no
    dwell, but the closed part of that session still counts as foreground
    time.
    """
    report = DwellReport()
    in_session = False
    focus: str | None = None
    focus_since = 0
    session_start = 0
    last_ts = 0

    def close_focus(end_ts: int) -> None:
        if focus is not None:
            report.dwell_ms[focus] += end_ts - focus_since

    for ev in events:
        last_ts = ev.ts
        if ev.event is EventTag.FOREGROUND:
            if in_session:
                close_focus(ev.ts)
                report.total_foreground_ms += ev.ts - session_start
            in_session = True
            report.session_count += 1
            session_start = ev.ts
            focus = "trips"
            focus_since = ev.ts
        elif ev.event is EventTag.BACKGROUND:
            if in_session:
                close_focus(ev.ts)
                report.total_foreground_ms += ev.ts - session_start
                in_session = False
                focus = None
        else:
            if in_session:
                close_focus(ev.ts)
                focus = _TAB_OF_TAG[ev.event]
                focus_since = ev.ts
    if in_session:
        # log ended mid-session: count foreground up to the last event only
        report.total_foreground_ms += last_ts - session_start
    return report


@dataclass(frozen=True)
class PositionPairs:
    """Carbon/cost dwell regrouped by display position for order-effect analysis."""

    second_ms: tuple[int, ...]
    third_ms: tuple[int, ...]
    participants: tuple[str, ...]
    excluded: int


def dwell_by_display_position(
    reports: Mapping[str, DwellReport],
    second_tab: Mapping[str, str],
) -> PositionPairs:
    """Regroup each participant's carbon/cost dwell into (second, third) pairs.

    second_tab gives which of "carbon"/"cost" the store's randomized order
    displayed second for that participant; participants missing an
    assignment are excluded and counted.
    """
    seconds, thirds, names = [], [], []
    excluded = 0
    for participant in sorted(reports):
        order = second_tab.get(participant)
        if order not in ("carbon", "cost"):
            excluded += 1
            continue
        report = reports[participant]
        other = "cost" if order == "carbon" else "carbon"
        seconds.append(report.dwell_ms[order])
        thirds.append(report.dwell_ms[other])
        names.append(participant)
    return PositionPairs(
        second_ms=tuple(seconds),
        third_ms=tuple(thirds),
        participants=tuple(names),
        excluded=excluded,
    )


def dwell_csv(reports: Mapping[str, DwellReport]) -> str:
    """Flat CSV export: participant,tab,dwell_ms."""
    lines = ["participant,tab,dwell_ms"]
    for participant in sorted(reports):
        for tab in TABS:
            lines.append(f"{participant},{tab},{reports[participant].dwell_ms[tab]}")
    return "\n".join(lines) + "\n"
