import random

import pytest
from hypothesis import given, strategies as st

from conftest import make_trip, make_summary
from ecoprobe.engine import (
    CATALOG_HEADER,
    DEFAULT_CATALOG_PATH,
    ParseCatalogError,
    Powertrain,
    PriceConfig,
    Totals,
    VehicleCategory,
    VehicleProfile,
    aggregate,
    eco_fraction,
    load_vehicle_catalog,
    parse_vehicle_catalog,
    trip_gallons,
    trip_summary,
)
from ecoprobe.model import TripMode


def profile(mpg: float = 30.0, override: float | None = None) -> VehicleProfile:
    return VehicleProfile(VehicleCategory.MIDSIZE_CAR, Powertrain.ICE, mpg, override)


# --- eco_fraction ------------------------------------------------------------


def test_eco_fraction_city_tier():
    assert eco_fraction(3.0) == 0.175
    assert eco_fraction(0.0) == 0.175


def test_eco_fraction_highway_tier():
    assert eco_fraction(20.0) == 0.039


def test_eco_fraction_midpoint():
    assert eco_fraction(10.0) == pytest.approx(0.107, abs=1e-12)


def test_eco_fraction_continuous_at_both_knees():
    ramp = lambda d: 0.175 - (d - 5.0) / 10.0 * (0.175 - 0.039)
    assert abs(eco_fraction(5.0) - ramp(5.0)) <= 1e-12
    assert abs(eco_fraction(15.0) - ramp(15.0)) <= 1e-12


def test_eco_fraction_monotone_and_in_range():
    prev = 1.0
    for i in range(1001):
        d = i * 25.0 / 1000.0
        f = eco_fraction(d)
        assert 0.039 <= f <= 0.175
        assert f <= prev + 1e-15
        prev = f


def test_eco_fraction_rejects_negative():
    with pytest.raises(ValueError):
        eco_fraction(-0.1)


# --- gallons and summaries -----------------------------------------------------


def test_trip_gallons_unit_ratio():
    assert trip_gallons(make_trip(distance_miles=30.0), profile(30.0)) == 1.0


def test_trip_gallons_zero_distance():
    assert trip_gallons(make_trip(distance_miles=0.0), profile(30.0)) == 0.0


def test_trip_gallons_hand_value():
    assert trip_gallons(make_trip(distance_miles=10.0), profile(32.0)) == pytest.approx(0.3125)


def test_trip_gallons_rejects_non_automotive():
    walk = make_trip(distance_miles=1.0, mode=TripMode.WALKING)
    with pytest.raises(ValueError, match="not a fuel trip"):
        trip_gallons(walk, profile())


def test_trip_summary_default_fixture():
    s = trip_summary(make_trip(distance_miles=10.0), profile(30.0), PriceConfig())
    assert s.cost.amount_usd == pytest.approx(1.2833, abs=1e-4)
    assert s.co2.co2_kg == pytest.approx(2.9623, abs=1e-4)
    assert s.eco_fraction == pytest.approx(0.107, abs=1e-12)
    assert s.potential_cost_saving.amount_usd == pytest.approx(0.1373, abs=1e-4)
    assert s.potential_co2_saving.co2_kg == pytest.approx(0.3170, abs=1e-4)


def test_trip_summary_zero_miles():
    s = trip_summary(make_trip(distance_miles=0.0), profile(30.0), PriceConfig())
    assert s.gallons == 0.0
    assert s.cost.amount_usd == 0.0
    assert s.co2.co2_kg == 0.0
    assert s.eco_fraction == 0.175
    assert s.potential_cost_saving.amount_usd == 0.0


def test_trip_summary_gram_per_mile_override_ignores_mpg():
    for mpg in (10.0, 30.0, 55.0):
        s = trip_summary(
            make_trip(distance_miles=10.0), profile(mpg, override=300.0), PriceConfig()
        )
        assert s.co2.co2_kg == pytest.approx(3.0, abs=1e-12)


def test_co2_cost_ratio_constant_without_override():
    prices = PriceConfig()
    for d in (1.0, 4.2, 12.0, 44.0):
        s = trip_summary(make_trip(distance_miles=d), profile(27.0), prices)
        assert s.co2.co2_kg / s.cost.amount_usd == pytest.approx(
            prices.co2_kg_per_gal / prices.fuel_usd_per_gal, rel=1e-3
        )


def test_cost_and_co2_are_linear_in_distance():
    # linear up to the 4-decimal quantization of Money/Emission
    prices = PriceConfig()
    base = trip_summary(make_trip(distance_miles=7.0), profile(27.0), prices)
    double = trip_summary(make_trip(distance_miles=14.0), profile(27.0), prices)
    assert double.cost.amount_usd == pytest.approx(2 * base.cost.amount_usd, abs=2e-4)
    assert double.co2.co2_kg == pytest.approx(2 * base.co2.co2_kg, abs=2e-4)
    assert double.gallons == pytest.approx(2 * base.gallons, rel=1e-12)


def test_potential_saving_below_total_for_nonzero_trip():
    s = trip_summary(make_trip(distance_miles=7.5), profile(30.0), PriceConfig())
    assert 0 < s.potential_cost_saving.amount_usd < s.cost.amount_usd
    assert 0 < s.potential_co2_saving.co2_kg < s.co2.co2_kg


# --- aggregation ----------------------------------------------------------------


def test_aggregate_empty_is_zero():
    totals = aggregate([])
    assert totals == Totals.zero()
    assert totals.trip_count == 0


def test_aggregate_adds_costs():
    t1 = make_trip("a", start_ts=1_000)
    t2 = make_trip("b", start_ts=2_000)
    pairs = [(t1, make_summary(t1, 1.0)), (t2, make_summary(t2, 2.0))]
    assert aggregate(pairs).cost.amount_usd == 3.0


def test_aggregate_time_range_is_half_open():
    t1 = make_trip("a", start_ts=1_000)
    t2 = make_trip("b", start_ts=2_000)
    pairs = [(t1, make_summary(t1, 1.0)), (t2, make_summary(t2, 2.0))]
    assert aggregate(pairs, start_ts=1_000, end_ts=2_000).trip_count == 1
    assert aggregate(pairs, start_ts=2_000, end_ts=3_000).trip_count == 1
    assert aggregate(pairs, start_ts=2_001).trip_count == 0


@given(st.lists(st.floats(min_value=0.0, max_value=50.0), max_size=30), st.integers(0, 30))
def test_aggregate_partition_additivity(costs, split_raw):
    pairs = []
    for i, c in enumerate(costs):
        trip = make_trip(f"t{i}", start_ts=1_000 + i)
        pairs.append((trip, make_summary(trip, c)))
    split = min(split_raw, len(pairs))
    whole = aggregate(pairs)
    first = aggregate(pairs[:split])
    second = aggregate(pairs[split:])
    assert whole.cost.amount_usd == pytest.approx(
        first.cost.amount_usd + second.cost.amount_usd, abs=1e-9
    )
    assert whole.co2.co2_kg == pytest.approx(first.co2.co2_kg + second.co2.co2_kg, abs=1e-9)
    assert whole.trip_count == first.trip_count + second.trip_count


def test_aggregate_partition_additivity_200_random_sets(rng: random.Random):
    for _ in range(200):
        n = rng.randint(0, 20)
        pairs = []
        for i in range(n):
            trip = make_trip(f"t{i}", start_ts=1_000 + i)
            pairs.append((trip, make_summary(trip, rng.uniform(0, 30))))
        split = rng.randint(0, n)
        whole = aggregate(pairs)
        left, right = aggregate(pairs[:split]), aggregate(pairs[split:])
        assert whole.cost.amount_usd == pytest.approx(
            left.cost.amount_usd + right.cost.amount_usd, abs=1e-9
        )
        assert whole.potential_co2_saving.co2_kg == pytest.approx(
            left.potential_co2_saving.co2_kg + right.potential_co2_saving.co2_kg, abs=1e-9
        )


# --- vehicle catalog -------------------------------------------------------------


def test_shipped_catalog_covers_every_category_powertrain_pair():
    catalog = load_vehicle_catalog()
    assert len(catalog) == 16
    for category in VehicleCategory:
        for powertrain in Powertrain:
            profile = catalog[(category, powertrain)]
            assert profile.mpg_combined > 0


def test_shipped_catalog_pins_reference_rows():
    catalog = load_vehicle_catalog(DEFAULT_CATALOG_PATH)
    assert catalog[(VehicleCategory.MIDSIZE_CAR, Powertrain.ICE)].mpg_combined == 30.0
    assert catalog[(VehicleCategory.SMALL_CAR, Powertrain.HEV)].mpg_combined == 52.0
    assert catalog[(VehicleCategory.TRUCK, Powertrain.ICE)].mpg_combined == 19.0
    # HEV beats ICE within every category in the shipped file
    for category in VehicleCategory:
        assert (
            catalog[(category, Powertrain.HEV)].mpg_combined
            > catalog[(category, Powertrain.ICE)].mpg_combined
        )


def test_catalog_override_column_parses():
    text = CATALOG_HEADER + "\nsuv,ICE,24.0,390.5\n"
    catalog = parse_vehicle_catalog(text)
    assert catalog[(VehicleCategory.SUV, Powertrain.ICE)].co2_g_per_mile == 390.5


def test_catalog_override_column_may_be_omitted():
    text = CATALOG_HEADER + "\nsuv,ICE,24.0\n"
    catalog = parse_vehicle_catalog(text)
    assert catalog[(VehicleCategory.SUV, Powertrain.ICE)].co2_g_per_mile is None


def test_catalog_requires_header():
    with pytest.raises(ParseCatalogError):
        parse_vehicle_catalog("suv,ICE,24.0,\n")


def test_catalog_rejects_bad_rows():
    with pytest.raises((ParseCatalogError, ValueError)):
        parse_vehicle_catalog(CATALOG_HEADER + "\nhovercraft,ICE,24.0,\n")
    with pytest.raises((ParseCatalogError, ValueError)):
        parse_vehicle_catalog(CATALOG_HEADER + "\nsuv,ICE,-3.0,\n")


def test_price_config_validation():
    with pytest.raises(ValueError):
        PriceConfig(fuel_usd_per_gal=0.0)
    with pytest.raises(ValueError):
        PriceConfig(co2_kg_per_gal=-1.0)
