import random

import pytest

from ecoprobe.engine import TripCostSummary, eco_fraction
from ecoprobe.model import Emission, GeoPoint, Money, Trip, TripMode


def make_trip(
    trip_id: str = "t1",
    start_ts: int = 1_700_000_000_000,
    duration_ms: int = 600_000,
    distance_miles: float = 10.0,
    mode: TripMode = TripMode.AUTOMOTIVE,
) -> Trip:
    return Trip(
        id=trip_id,
        start_ts=start_ts,
        end_ts=start_ts + duration_ms,
        origin=GeoPoint(37.0, -122.0),
        destination=GeoPoint(37.0, -122.0),
        distance_miles=distance_miles,
        mode=mode,
    )


def make_summary(trip: Trip, cost_usd: float, co2_kg: float | None = None) -> TripCostSummary:
    """Synthetic summary with a prescribed cost, for goal/aggregate fixtures."""
    co2 = co2_kg if co2_kg is not None else cost_usd * 2.0
    fraction = eco_fraction(trip.distance_miles)
    cost = Money(cost_usd)
    emission = Emission(co2)
    return TripCostSummary(
        trip_id=trip.id,
        gallons=cost_usd / 3.85,
        cost=cost,
        co2=emission,
        eco_fraction=fraction,
        potential_cost_saving=cost.scaled(fraction),
        potential_co2_saving=emission.scaled(fraction),
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20230615)
