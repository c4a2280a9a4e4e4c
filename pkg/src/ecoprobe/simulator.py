"""Seeded synthetic sensor traces with ground-truth trip labels.

Scenarios are piecewise-constant motion segments (drive / walk / idle); the
generator walks the exact great-circle path, adds isotropic Gaussian position
noise on a local tangent plane, and emits paired location + motion samples at
a fixed cadence. Ground truth is analytic: one trip per drive segment with
distance speed x duration.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Literal, Sequence

from .model import (
    Activity,
    EARTH_RADIUS_KM,
    GeoPoint,
    LocationSample,
    METERS_PER_MILE,
    MotionSample,
    TraceRecord,
    Trip,
    TripMode,
)
from .trace_io import TraceFile

PRNG_NAME = "python-random-gauss"

_SEGMENT_ACTIVITY = {
    "drive": Activity.AUTOMOTIVE,
    "walk": Activity.WALKING,
    "idle": Activity.STATIONARY,
}

_EARTH_RADIUS_M = EARTH_RADIUS_KM * 1000.0
_METERS_PER_DEG = _EARTH_RADIUS_M * math.pi / 180.0
_TIME_EPS = 1e-9


@dataclass(frozen=True)
class Segment:
    kind: Literal["drive", "walk", "idle"]
    duration_s: float
    speed_mps: float = 0.0
    heading_deg: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in _SEGMENT_ACTIVITY:
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if self.duration_s <= 0:
            raise ValueError("duration_s must be positive")
        if self.speed_mps < 0:
            raise ValueError("speed_mps must be >= 0")


@dataclass(frozen=True)
class Scenario:
    seed: int
    segments: tuple[Segment, ...]
    sample_period_s: float = 1.0
    gps_noise_sigma_m: float = 0.0
    motion_confidence: float = 0.9
    origin: GeoPoint = field(default_factory=lambda: GeoPoint(37.0, -122.0))
    start_ts: int = 1_700_000_000_000

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("scenario needs at least one segment")
        if self.sample_period_s <= 0:
            raise ValueError("sample_period_s must be positive")
        if self.gps_noise_sigma_m < 0:
            raise ValueError("gps_noise_sigma_m must be >= 0")
        if not 0.0 <= self.motion_confidence <= 1.0:
            raise ValueError("motion_confidence must be in [0, 1]")


@dataclass(frozen=True)
class GroundTruth:
    trips: tuple[Trip, ...]


def trace_comment(scenario: Scenario) -> str:
    """Provenance line recorded in emitted trace files."""
    return f"prng={PRNG_NAME} seed={scenario.seed}"


def _gc_step(point: GeoPoint, meters: float, heading_deg: float) -> GeoPoint:
    """Exact spherical forward step: the haversine back to `point` equals `meters`.

    Keeping each leg exactly its nominal length means path sums over sampled
    points never undercut the analytic segment distance, and endpoint chords
    never exceed it (triangle inequality on the sphere).
    """
    if meters == 0.0:
        return point
    delta = meters / _EARTH_RADIUS_M
    theta = math.radians(heading_deg)
    phi1 = math.radians(point.lat)
    lam1 = math.radians(point.lon)
    sin_phi2 = math.sin(phi1) * math.cos(delta) + math.cos(phi1) * math.sin(delta) * math.cos(theta)
    sin_phi2 = max(-1.0, min(1.0, sin_phi2))
    phi2 = math.asin(sin_phi2)
    lam2 = lam1 + math.atan2(
        math.sin(theta) * math.sin(delta) * math.cos(phi1),
        math.cos(delta) - math.sin(phi1) * sin_phi2,
    )
    lon2 = math.degrees(lam2)
    if lon2 > 180.0:
        lon2 -= 360.0
    elif lon2 < -180.0:
        lon2 += 360.0
    return GeoPoint(math.degrees(phi2), lon2)


def simulate(scenario: Scenario) -> tuple[TraceFile, GroundTruth]:
    """Generate a trace and its ground truth; identical seeds give identical output.

    A location and a motion sample are emitted together every sample period,
    plus a closing pair at the exact scenario end. A sample landing on a
    segment boundary belongs to the later segment.
    """
    rng = random.Random(scenario.seed)
    sigma = scenario.gps_noise_sigma_m
    segments = scenario.segments

    ends = []
    t = 0.0
    for seg in segments:
        t += seg.duration_s
        ends.append(t)
    total_s = t

    sample_times = []
    k = 0
    while k * scenario.sample_period_s < total_s - _TIME_EPS:
        sample_times.append(k * scenario.sample_period_s)
        k += 1
    sample_times.append(total_s)

    records = []
    pos = scenario.origin
    prev_t = 0.0
    seg_idx = 0
    boundary_pos = [scenario.origin]  # path position at each segment start + final end
    for time_s in sample_times:
        while prev_t < time_s - _TIME_EPS:
            seg = segments[seg_idx]
            slice_end = min(ends[seg_idx], time_s)
            if seg.kind != "idle" and seg.speed_mps > 0:
                pos = _gc_step(pos, seg.speed_mps * (slice_end - prev_t), seg.heading_deg)
            prev_t = slice_end
            if prev_t >= ends[seg_idx] - _TIME_EPS:
                boundary_pos.append(pos)
                if seg_idx < len(segments) - 1:
                    seg_idx += 1
                else:
                    break
        seg = segments[seg_idx]
        if sigma > 0:
            north = rng.gauss(0.0, sigma)
            east = rng.gauss(0.0, sigma)
            noisy = GeoPoint(
                pos.lat + north / _METERS_PER_DEG,
                pos.lon + east / (_METERS_PER_DEG * math.cos(math.radians(pos.lat))),
            )
        else:
            noisy = pos
        ts = scenario.start_ts + int(round(time_s * 1000))
        records.append(
            TraceRecord(
                ts=ts,
                payload=LocationSample(
                    point=noisy,
                    horizontal_accuracy_m=max(sigma, 5.0),
                    speed_mps=0.0 if seg.kind == "idle" else seg.speed_mps,
                ),
            )
        )
        records.append(
            TraceRecord(
                ts=ts,
                payload=MotionSample(
                    activity=_SEGMENT_ACTIVITY[seg.kind],
                    confidence=scenario.motion_confidence,
                ),
            )
        )

    truth = []
    seg_start_s = 0.0
    n = 0
    for i, seg in enumerate(segments):
        if seg.kind == "drive":
            truth.append(
                Trip(
                    id=f"g{n}",
                    start_ts=scenario.start_ts + int(round(seg_start_s * 1000)),
                    end_ts=scenario.start_ts + int(round(ends[i] * 1000)),
                    origin=boundary_pos[i],
                    destination=boundary_pos[i + 1],
                    distance_miles=seg.speed_mps * seg.duration_s / METERS_PER_MILE,
                    mode=TripMode.AUTOMOTIVE,
                )
            )
            n += 1
        seg_start_s = ends[i]
    return TraceFile(records=tuple(records)), GroundTruth(trips=tuple(truth))


@dataclass(frozen=True)
class DetectionReport:
    precision: float
    recall: float
    median_distance_error_fraction: float | None
    matched: int
    detected_count: int
    truth_count: int
    distance_errors: tuple[float, ...]

    @property
    def zero_detections(self) -> bool:
        return self.detected_count == 0


def _overlap_ms(a: Trip, b: Trip) -> int:
    return max(0, min(a.end_ts, b.end_ts) - max(a.start_ts, b.start_ts))


def evaluate_detection(
    detected: Sequence[Trip], truth: Sequence[Trip], match_overlap: float = 0.5
) -> DetectionReport:
    """Greedy one-to-one matching in time order against ground truth.

    A detected trip matches a truth trip when their temporal overlap covers
    at least match_overlap of the truth duration. With zero detections,
    precision is reported as 1 and flagged via zero_detections.
    """
    i = j = 0
    errors = []
    matched = 0
    while i < len(detected) and j < len(truth):
        det, tru = detected[i], truth[j]
        ratio = _overlap_ms(det, tru) / (tru.end_ts - tru.start_ts)
        if ratio >= match_overlap:
            matched += 1
            errors.append(abs(det.distance_miles - tru.distance_miles) / tru.distance_miles)
            i += 1
            j += 1
        elif det.end_ts < tru.end_ts:
            i += 1
        else:
            j += 1
    precision = matched / len(detected) if detected else 1.0
    recall = matched / len(truth) if truth else 1.0
    median = None
    if errors:
        ordered = sorted(errors)
        mid = len(ordered) // 2
        median = ordered[mid] if len(ordered) % 2 == 1 else (ordered[mid - 1] + ordered[mid]) / 2.0
    return DetectionReport(
        precision=precision,
        recall=recall,
        median_distance_error_fraction=median,
        matched=matched,
        detected_count=len(detected),
        truth_count=len(truth),
        distance_errors=tuple(errors),
    )


def truth_to_json(truth: GroundTruth) -> str:
    payload = {
        "trips": [
            {
                "start_ts": t.start_ts,
                "end_ts": t.end_ts,
                "distance_miles": t.distance_miles,
                "mode": t.mode.value,
            }
            for t in truth.trips
        ]
    }
    return json.dumps(payload, indent=2) + "\n"


def truth_from_json(text: str) -> GroundTruth:
    """Load a ground-truth sidecar; endpoint coordinates are not persisted."""
    data = json.loads(text)
    trips = []
    for n, item in enumerate(data["trips"]):
        trips.append(
            Trip(
                id=f"g{n}",
                start_ts=int(item["start_ts"]),
                end_ts=int(item["end_ts"]),
                origin=GeoPoint(0.0, 0.0),
                destination=GeoPoint(0.0, 0.0),
                distance_miles=float(item["distance_miles"]),
                mode=TripMode(item["mode"]),
            )
        )
    return GroundTruth(trips=tuple(trips))


def scenario_from_json(text: str, seed: int) -> Scenario:
    """Build a scenario from the CLI's JSON description plus an explicit seed."""
    data = json.loads(text)
    segments = tuple(
        Segment(
            kind=s["kind"],
            duration_s=float(s["duration_s"]),
            speed_mps=float(s.get("speed_mps", 0.0)),
            heading_deg=float(s.get("heading_deg", 0.0)),
        )
        for s in data["segments"]
    )
    kwargs = {}
    if "origin" in data:
        kwargs["origin"] = GeoPoint(float(data["origin"]["lat"]), float(data["origin"]["lon"]))
    if "start_ts" in data:
        kwargs["start_ts"] = int(data["start_ts"])
    return Scenario(
        seed=seed,
        segments=segments,
        sample_period_s=float(data.get("sample_period_s", 1.0)),
        gps_noise_sigma_m=float(data.get("gps_noise_sigma_m", 0.0)),
        motion_confidence=float(data.get("motion_confidence", 0.9)),
        **kwargs,
    )
