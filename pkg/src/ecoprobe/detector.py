"""Trip segmentation from sensor traces, mode classification, and route distance.

A trip starts at the first location sample moving at least start_speed_mps
that has an automotive motion confirmation within AUTO_GATE_WINDOW_MS, and
ends once no sample reaches that speed for end_dwell_ms (the end timestamp
is the last fast sample's). Route distance comes from a pluggable provider
over the trip's location points; the default multiplies the haversine path
sum by a winding factor to approximate road curvature on sparse traces.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Callable, Sequence

from .model import (
    Activity,
    GeoPoint,
    LocationSample,
    METERS_PER_MILE,
    MotionSample,
    TripMode,
    Trip,
    haversine_miles,
)
from .trace_io import TraceFile

AUTO_GATE_WINDOW_MS = 60_000

# Dense traces with GPS noise inflate a leg-by-leg path sum (random-walk
# effect), so points are thinned to this spacing before measuring distance.
DISTANCE_POINT_SPACING_MS = 30_000

_ACTIVITY_MODE = {
    Activity.AUTOMOTIVE: TripMode.AUTOMOTIVE,
    Activity.CYCLING: TripMode.CYCLING,
    Activity.WALKING: TripMode.WALKING,
    Activity.RUNNING: TripMode.WALKING,  # pedestrian movement
    Activity.STATIONARY: TripMode.OTHER,
    Activity.UNKNOWN: TripMode.OTHER,
}

_MODE_TIE_ORDER = {
    TripMode.AUTOMOTIVE: 3,
    TripMode.CYCLING: 2,
    TripMode.WALKING: 1,
    TripMode.OTHER: 0,
}

DistanceProvider = Callable[[Sequence[GeoPoint]], float]


@dataclass(frozen=True)
class DetectorConfig:
    min_auto_confidence: float = 0.5
    start_speed_mps: float = 4.0
    end_dwell_ms: int = 300_000
    min_trip_distance_miles: float = 0.25
    winding_factor: float = 1.15

    def __post_init__(self) -> None:
        if not 0.0 <= self.min_auto_confidence <= 1.0:
            raise ValueError("min_auto_confidence must be in [0, 1]")
        if self.start_speed_mps < 0:
            raise ValueError("start_speed_mps must be >= 0")
        if self.end_dwell_ms <= 0:
            raise ValueError("end_dwell_ms must be positive")
        if self.min_trip_distance_miles < 0:
            raise ValueError("min_trip_distance_miles must be >= 0")
        if self.winding_factor < 1.0:
            raise ValueError("winding_factor must be >= 1.0")


def path_distance(points: Sequence[GeoPoint], winding_factor: float = 1.0) -> float:
    """Haversine path length times the winding factor, in miles."""
    if len(points) < 2:
        return 0.0
    legs = sum(haversine_miles(a, b) for a, b in zip(points, points[1:]))
    return legs * winding_factor


def make_path_provider(winding_factor: float) -> DistanceProvider:
    return lambda points: path_distance(points, winding_factor)


def classify_mode(motion: Sequence[tuple[int, MotionSample]], end_ts: int) -> TripMode:
    """Mode with the largest confidence-weighted duration share.

    Each sample holds its activity until the next motion sample or the
    window end; exact ties resolve automotive > cycling > walking > other.
    """
    if not motion:
        raise ValueError("classify_mode needs a non-empty window")
    weights: dict[TripMode, float] = {}
    for i, (ts, sample) in enumerate(motion):
        until = motion[i + 1][0] if i + 1 < len(motion) else end_ts
        duration = max(until - ts, 0)
        mode = _ACTIVITY_MODE[sample.activity]
        weights[mode] = weights.get(mode, 0.0) + duration * sample.confidence
    if all(w == 0.0 for w in weights.values()):
        # zero-length window: fall back to confidence alone
        for ts, sample in motion:
            mode = _ACTIVITY_MODE[sample.activity]
            weights[mode] = weights.get(mode, 0.0) + sample.confidence
    return max(weights, key=lambda m: (weights[m], _MODE_TIE_ORDER[m]))


def _effective_speeds(locs: list[tuple[int, LocationSample]]) -> list[float]:
    """Reported speed, or chord/Δt from the previous location when unknown."""
    speeds = []
    for i, (ts, sample) in enumerate(locs):
        if sample.speed_mps is not None:
            speeds.append(sample.speed_mps)
        elif i == 0:
            speeds.append(0.0)
        else:
            prev_ts, prev = locs[i - 1]
            dt_s = (ts - prev_ts) / 1000.0
            if dt_s <= 0:
                speeds.append(0.0)
            else:
                chord_m = haversine_miles(prev.point, sample.point) * METERS_PER_MILE
                speeds.append(chord_m / dt_s)
    return speeds


def _thin_points(locs: list[tuple[int, LocationSample]]) -> list[GeoPoint]:
    points = [locs[0][1].point]
    last_kept_ts = locs[0][0]
    for ts, sample in locs[1:-1]:
        if ts - last_kept_ts >= DISTANCE_POINT_SPACING_MS:
            points.append(sample.point)
            last_kept_ts = ts
    if len(locs) > 1:
        points.append(locs[-1][1].point)
    return points


def detect_trips(
    trace: TraceFile,
    cfg: DetectorConfig | None = None,
    dist: DistanceProvider | None = None,
) -> list[Trip]:
    """Segment a sorted trace into non-overlapping trips ordered by start time.

    Trips whose measured distance falls below min_trip_distance_miles are
    discarded. Ids are provisional ("d0", "d1", ...); a store re-keys them
    at journal time.
    """
    cfg = cfg or DetectorConfig()
    if dist is None:
        dist = make_path_provider(cfg.winding_factor)

    locs: list[tuple[int, LocationSample]] = []
    motions: list[tuple[int, MotionSample]] = []
    for rec in trace.records:
        if isinstance(rec.payload, LocationSample):
            locs.append((rec.ts, rec.payload))
        else:
            motions.append((rec.ts, rec.payload))
    if not locs:
        return []

    speeds = _effective_speeds(locs)
    auto_ts = [
        ts
        for ts, m in motions
        if m.activity is Activity.AUTOMOTIVE and m.confidence >= cfg.min_auto_confidence
    ]

    def auto_confirmed(ts: int) -> bool:
        i = bisect.bisect_left(auto_ts, ts - AUTO_GATE_WINDOW_MS)
        return i < len(auto_ts) and auto_ts[i] <= ts + AUTO_GATE_WINDOW_MS

    segments: list[tuple[int, int]] = []  # (start index, last fast index)
    start_idx: int | None = None
    last_fast_idx = 0
    for i, (ts, _) in enumerate(locs):
        fast = speeds[i] >= cfg.start_speed_mps
        if start_idx is None:
            if fast and auto_confirmed(ts):
                start_idx = i
                last_fast_idx = i
        else:
            if fast:
                last_fast_idx = i
            elif ts - locs[last_fast_idx][0] >= cfg.end_dwell_ms:
                segments.append((start_idx, last_fast_idx))
                start_idx = None
    if start_idx is not None:
        segments.append((start_idx, last_fast_idx))

    trips = []
    for n, (a, b) in enumerate(segments):
        window = locs[a : b + 1]
        start_ts, end_ts = window[0][0], window[-1][0]
        if end_ts <= start_ts:
            continue
        distance = dist(_thin_points(window))
        if distance < cfg.min_trip_distance_miles:
            continue
        in_window = [(ts, m) for ts, m in motions if start_ts <= ts <= end_ts]
        # an empty motion window means the start gate alone vouched for the trip
        mode = classify_mode(in_window, end_ts) if in_window else TripMode.AUTOMOTIVE
        trips.append(
            Trip(
                id=f"d{n}",
                start_ts=start_ts,
                end_ts=end_ts,
                origin=window[0][1].point,
                destination=window[-1][1].point,
                distance_miles=distance,
                mode=mode,
            )
        )
    return trips
