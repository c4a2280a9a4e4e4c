"""Shared vocabulary types, unit-carrying quantities, and geodesic primitives."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from enum import Enum

EARTH_RADIUS_KM = 6371.0088  # mean Earth radius (spherical model)
METERS_PER_MILE = 1609.344
MS_PER_DAY = 86_400_000

# A path sum can undercut the endpoint chord only through float rounding.
CHORD_SLACK_MILES = 1e-6


class Activity(str, Enum):
    """Motion-activity labels as reported by a phone-like activity classifier."""

    AUTOMOTIVE = "automotive"
    WALKING = "walking"
    RUNNING = "running"
    CYCLING = "cycling"
    STATIONARY = "stationary"
    UNKNOWN = "unknown"


class TripMode(str, Enum):
    """Transport mode assigned to a detected trip."""

    AUTOMOTIVE = "automotive"
    WALKING = "walking"
    CYCLING = "cycling"
    OTHER = "other"


def now_ms() -> int:
    return time.time_ns() // 1_000_000


def _check_finite(name: str, value: float) -> None:
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ValueError(f"{name} must be a finite number, got {value!r}")


@dataclass(frozen=True)
class GeoPoint:
    """A WGS-84-style latitude/longitude pair in decimal degrees."""

    lat: float
    lon: float

    def __post_init__(self) -> None:
        _check_finite("lat", self.lat)
        _check_finite("lon", self.lon)
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"lat out of range [-90, 90]: {self.lat}")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"lon out of range [-180, 180]: {self.lon}")


@dataclass(frozen=True)
class LocationSample:
    """One coarse location update; speed may be unreported by the sensor."""

    point: GeoPoint
    horizontal_accuracy_m: float
    speed_mps: float | None = None

    def __post_init__(self) -> None:
        _check_finite("horizontal_accuracy_m", self.horizontal_accuracy_m)
        if self.horizontal_accuracy_m < 0:
            raise ValueError("horizontal_accuracy_m must be >= 0")
        if self.speed_mps is not None:
            _check_finite("speed_mps", self.speed_mps)
            if self.speed_mps < 0:
                raise ValueError("speed_mps must be >= 0 when present")


@dataclass(frozen=True)
class MotionSample:
    """One activity-classifier report with its confidence."""

    activity: Activity
    confidence: float

    def __post_init__(self) -> None:
        _check_finite("confidence", self.confidence)
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence out of [0, 1]: {self.confidence}")


@dataclass(frozen=True)
class TraceRecord:
    """A timestamped sensor sample: either a location or a motion report."""

    ts: int
    payload: LocationSample | MotionSample

    def __post_init__(self) -> None:
        if not isinstance(self.ts, int) or self.ts <= 0:
            raise ValueError(f"ts must be a positive Unix-ms integer, got {self.ts!r}")


@dataclass(frozen=True)
class Trip:
    """A detected journey with endpoints, timestamps, distance, and mode."""

    id: str
    start_ts: int
    end_ts: int
    origin: GeoPoint
    destination: GeoPoint
    distance_miles: float
    mode: TripMode
    deleted: bool = False

    def __post_init__(self) -> None:
        if self.end_ts <= self.start_ts:
            raise ValueError("end_ts must be greater than start_ts")
        _check_finite("distance_miles", self.distance_miles)
        if self.distance_miles < 0:
            raise ValueError("distance_miles must be >= 0")
        chord = haversine_miles(self.origin, self.destination)
        if self.distance_miles < chord - CHORD_SLACK_MILES:
            raise ValueError(
                f"distance_miles {self.distance_miles:.6f} below endpoint "
                f"chord {chord:.6f}"
            )


@dataclass(frozen=True)
class Money:
    """Non-negative USD amount, quantized to 4 decimals internally.

    Display rounding to cents happens only at serialization time so that
    aggregation over many small trips does not accumulate rounding bias.
    """

    amount_usd: float

    def __post_init__(self) -> None:
        _check_finite("amount_usd", self.amount_usd)
        if self.amount_usd < 0:
            raise ValueError("amount_usd must be >= 0")
        object.__setattr__(self, "amount_usd", round(float(self.amount_usd), 4))

    def __add__(self, other: "Money") -> "Money":
        return Money(self.amount_usd + other.amount_usd)

    def scaled(self, factor: float) -> "Money":
        return Money(self.amount_usd * factor)

    def display(self) -> str:
        """Cents-rounded string for UI and wire formats."""
        return f"{self.amount_usd:.2f}"


@dataclass(frozen=True)
class Emission:
    """Non-negative CO2 mass in kilograms."""

    co2_kg: float

    def __post_init__(self) -> None:
        _check_finite("co2_kg", self.co2_kg)
        if self.co2_kg < 0:
            raise ValueError("co2_kg must be >= 0")
        object.__setattr__(self, "co2_kg", round(float(self.co2_kg), 4))

    def __add__(self, other: "Emission") -> "Emission":
        return Emission(self.co2_kg + other.co2_kg)

    def scaled(self, factor: float) -> "Emission":
        return Emission(self.co2_kg * factor)


def haversine_miles(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance between two points, in miles.

    Spherical haversine on the mean Earth radius; error against an
    ellipsoidal model stays under 0.5% at trip scales.
    """
    lat1, lon1, lat2, lon2 = map(
        math.radians, (a.lat, a.lon, b.lat, b.lon)
    )
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    arc = 2 * math.asin(min(1.0, math.sqrt(h)))
    return arc * EARTH_RADIUS_KM * 1000.0 / METERS_PER_MILE
