"""Fuel, cost, CO2, and eco-savings arithmetic per trip, plus aggregation."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable

from .model import Emission, Money, Trip, TripMode

# Eco-driving savings tiers: short non-highway trips can save the full city
# fraction, long highway trips the small highway fraction, with a linear
# ramp in between.
CITY_ECO_FRACTION = 0.175
HIGHWAY_ECO_FRACTION = 0.039
CITY_MAX_MILES = 5.0
HIGHWAY_MIN_MILES = 15.0

DEFAULT_CATALOG_PATH = Path(__file__).parent / "data" / "vehicles.csv"
CATALOG_HEADER = "category,powertrain,mpg,co2_g_per_mile"


class VehicleCategory(str, Enum):
    SMALL_CAR = "small_car"
    MIDSIZE_CAR = "midsize_car"
    LARGE_CAR = "large_car"
    SUV = "suv"
    MINIVAN = "minivan"
    TRUCK = "truck"
    STATION_WAGON = "station_wagon"
    SPORTS_CAR = "sports_car"


class Powertrain(str, Enum):
    ICE = "ICE"
    HEV = "HEV"


@dataclass(frozen=True)
class VehicleProfile:
    """Fuel economy for one category x powertrain, with an optional g/mi override."""

    category: VehicleCategory
    powertrain: Powertrain
    mpg_combined: float
    co2_g_per_mile: float | None = None

    def __post_init__(self) -> None:
        if not self.mpg_combined > 0:
            raise ValueError("mpg_combined must be positive")
        if self.co2_g_per_mile is not None and not self.co2_g_per_mile > 0:
            raise ValueError("co2_g_per_mile override must be positive when present")


@dataclass(frozen=True)
class PriceConfig:
    """Reference fuel price and gasoline combustion CO2 constant."""

    fuel_usd_per_gal: float = 3.85
    co2_kg_per_gal: float = 8.887

    def __post_init__(self) -> None:
        if not self.fuel_usd_per_gal > 0 or not self.co2_kg_per_gal > 0:
            raise ValueError("prices must be positive")


@dataclass(frozen=True)
class TripCostSummary:
    trip_id: str
    gallons: float
    cost: Money
    co2: Emission
    eco_fraction: float
    potential_cost_saving: Money
    potential_co2_saving: Emission


@dataclass(frozen=True)
class Totals:
    """Field-wise sums over a set of trip summaries."""

    cost: Money
    co2: Emission
    potential_cost_saving: Money
    potential_co2_saving: Emission
    trip_count: int

    @staticmethod
    def zero() -> "Totals":
        return Totals(Money(0.0), Emission(0.0), Money(0.0), Emission(0.0), 0)


def eco_fraction(distance_miles: float) -> float:
    """Potential eco-driving savings fraction for a trip of the given length.

    Flat tiers below CITY_MAX_MILES and above HIGHWAY_MIN_MILES, linear
    in between; both branch forms agree at the knees, so the function is
    continuous and monotonically non-increasing.
    """
    if distance_miles < 0:
        raise ValueError("distance_miles must be >= 0")
    if distance_miles <= CITY_MAX_MILES:
        return CITY_ECO_FRACTION
    if distance_miles >= HIGHWAY_MIN_MILES:
        return HIGHWAY_ECO_FRACTION
    span = HIGHWAY_MIN_MILES - CITY_MAX_MILES
    return CITY_ECO_FRACTION - (distance_miles - CITY_MAX_MILES) / span * (
        CITY_ECO_FRACTION - HIGHWAY_ECO_FRACTION
    )


def trip_gallons(trip: Trip, vehicle: VehicleProfile) -> float:
    if trip.mode is not TripMode.AUTOMOTIVE:
        raise ValueError(f"not a fuel trip: mode is {trip.mode.value}")
    return trip.distance_miles / vehicle.mpg_combined


def trip_summary(trip: Trip, vehicle: VehicleProfile, prices: PriceConfig) -> TripCostSummary:
    """Cost, CO2, and potential eco-savings for one automotive trip.

    CO2 comes from gallons times the per-gallon constant unless the vehicle
    carries a grams-per-mile override, which then applies directly to distance.
    """
    gallons = trip_gallons(trip, vehicle)
    cost = Money(gallons * prices.fuel_usd_per_gal)
    if vehicle.co2_g_per_mile is not None:
        co2 = Emission(trip.distance_miles * vehicle.co2_g_per_mile / 1000.0)
    else:
        co2 = Emission(gallons * prices.co2_kg_per_gal)
    fraction = eco_fraction(trip.distance_miles)
    return TripCostSummary(
        trip_id=trip.id,
        gallons=gallons,
        cost=cost,
        co2=co2,
        eco_fraction=fraction,
        potential_cost_saving=cost.scaled(fraction),
        potential_co2_saving=co2.scaled(fraction),
    )


def aggregate(
    pairs: Iterable[tuple[Trip, TripCostSummary]],
    start_ts: int | None = None,
    end_ts: int | None = None,
) -> Totals:
    """Sum summary fields over trips whose start_ts falls in [start_ts, end_ts).

    Callers pass non-deleted automotive trips; None bounds are unbounded.
    """
    total = Totals.zero()
    for trip, summary in pairs:
        if start_ts is not None and trip.start_ts < start_ts:
            continue
        if end_ts is not None and trip.start_ts >= end_ts:
            continue
        total = Totals(
            cost=total.cost + summary.cost,
            co2=total.co2 + summary.co2,
            potential_cost_saving=total.potential_cost_saving + summary.potential_cost_saving,
            potential_co2_saving=total.potential_co2_saving + summary.potential_co2_saving,
            trip_count=total.trip_count + 1,
        )
    return total


def parse_vehicle_catalog(text: str) -> dict[tuple[VehicleCategory, Powertrain], VehicleProfile]:
    """Parse the editable catalog CSV: category,powertrain,mpg,co2_g_per_mile."""
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and not row[0].startswith("#")]
    if not rows or ",".join(rows[0]).strip() != CATALOG_HEADER:
        raise ParseCatalogError(f"missing catalog header {CATALOG_HEADER!r}")
    catalog: dict[tuple[VehicleCategory, Powertrain], VehicleProfile] = {}
    for row in rows[1:]:
        if len(row) not in (3, 4):  # trailing override column may be omitted
            raise ParseCatalogError(f"bad catalog row: {row!r}")
        category = VehicleCategory(row[0])
        powertrain = Powertrain(row[1])
        raw_override = row[3].strip() if len(row) == 4 else ""
        override = None if raw_override == "" else float(raw_override)
        profile = VehicleProfile(category, powertrain, float(row[2]), override)
        catalog[(category, powertrain)] = profile
    if not catalog:
        raise ParseCatalogError("empty catalog")
    return catalog


def load_vehicle_catalog(
    path: Path | None = None,
) -> dict[tuple[VehicleCategory, Powertrain], VehicleProfile]:
    path = path or DEFAULT_CATALOG_PATH
    return parse_vehicle_catalog(path.read_text(encoding="utf-8"))


class ParseCatalogError(ValueError):
    """Vehicle catalog file is malformed."""
