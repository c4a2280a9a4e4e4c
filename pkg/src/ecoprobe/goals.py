"""Non-sliding goal windows: the previous window's totals become the next target."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Literal

from .model import MS_PER_DAY, Emission, Money, Trip
from .engine import TripCostSummary

DEFAULT_WINDOW_DAYS = 3

# Shown verbatim when the current window's running total beats the previous
# window's total; the dashboard renders it byte-for-byte.
EXCEEDED_MESSAGE = (
    "You drove more than last period, try again when the current period resets."
)

Metric = Literal["cost", "co2"]


class GoalKind(str, Enum):
    NO_GOAL_YET = "no_goal_yet"
    ON_TRACK = "on_track"
    EXCEEDED = "exceeded"


@dataclass(frozen=True)
class GoalWindow:
    """One fixed-length accounting window; end_ts is exclusive."""

    index: int
    start_ts: int
    end_ts: int
    cost: Money
    co2: Emission


@dataclass(frozen=True)
class GoalStatus:
    kind: GoalKind
    metric: Metric
    current_value: float
    goal_value: float | None = None
    message: str | None = None


def anchor_study_start(first_trip_start_ts: int, utc_offset_ms: int = 0) -> int:
    """Midnight (at the given UTC offset) of the first ingested trip's day.

    Midnight anchoring makes the windows align with the calendar days
    participants reason about; the offset defaults to UTC for determinism.
    """
    return ((first_trip_start_ts + utc_offset_ms) // MS_PER_DAY) * MS_PER_DAY - utc_offset_ms


def assign_windows(
    pairs: Iterable[tuple[Trip, TripCostSummary]],
    study_start_ts: int,
    now_ts: int,
    window_len_days: int = DEFAULT_WINDOW_DAYS,
) -> list[GoalWindow]:
    """Partition time from study start into equal windows and bucket trip totals.

    Window k covers [start + k*L, start + (k+1)*L); a trip lands in exactly
    one window by its start_ts (boundary timestamps go to the later window).
    Trailing empty windows are emitted up to the window containing now_ts.
    Deleted and non-automotive trips must already be filtered out by the caller,
    except that deleted trips passed in are skipped defensively.
    """
    if window_len_days < 1:
        raise ValueError("window_len_days must be >= 1")
    if now_ts < study_start_ts:
        raise ValueError("now_ts before study start")
    window_ms = window_len_days * MS_PER_DAY

    buckets: dict[int, tuple[Money, Emission]] = {}
    last_index = (now_ts - study_start_ts) // window_ms
    for trip, summary in pairs:
        if trip.deleted:
            continue
        if trip.start_ts < study_start_ts:
            raise ValueError(
                f"trip {trip.id} starts before study start; clamp study_start_ts first"
            )
        k = (trip.start_ts - study_start_ts) // window_ms
        cost, co2 = buckets.get(k, (Money(0.0), Emission(0.0)))
        buckets[k] = (cost + summary.cost, co2 + summary.co2)
        last_index = max(last_index, k)

    windows = []
    for k in range(last_index + 1):
        cost, co2 = buckets.get(k, (Money(0.0), Emission(0.0)))
        windows.append(
            GoalWindow(
                index=k,
                start_ts=study_start_ts + k * window_ms,
                end_ts=study_start_ts + (k + 1) * window_ms,
                cost=cost,
                co2=co2,
            )
        )
    return windows


def _metric_value(window: GoalWindow, metric: Metric) -> float:
    return window.cost.amount_usd if metric == "cost" else window.co2.co2_kg


def goal_status(windows: list[GoalWindow], metric: Metric, now_ts: int) -> GoalStatus:
    """Compare the current window's running total with the previous window's.

    No goal exists during window 0; afterwards the previous window's total is
    the (static) goal and the comparison is continuous: the exceeded message
    can appear mid-window as soon as the running total passes the goal.
    """
    if metric not in ("cost", "co2"):
        raise ValueError(f"unknown metric {metric!r}")
    if not windows:
        raise ValueError("no windows")
    if now_ts < windows[0].start_ts:
        raise ValueError("now_ts before study start")
    window_ms = windows[0].end_ts - windows[0].start_ts
    k = (now_ts - windows[0].start_ts) // window_ms
    if k >= len(windows):
        raise ValueError("windows do not cover now_ts; recompute assign_windows")

    current = _metric_value(windows[k], metric)
    if k == 0:
        return GoalStatus(kind=GoalKind.NO_GOAL_YET, metric=metric, current_value=current)
    goal = _metric_value(windows[k - 1], metric)
    if current > goal:
        return GoalStatus(
            kind=GoalKind.EXCEEDED,
            metric=metric,
            current_value=current,
            goal_value=goal,
            message=EXCEEDED_MESSAGE,
        )
    return GoalStatus(
        kind=GoalKind.ON_TRACK, metric=metric, current_value=current, goal_value=goal
    )
