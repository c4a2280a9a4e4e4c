import pytest

from ecoprobe.model import GeoPoint, LocationSample, Trip, TripMode, haversine_miles
from ecoprobe.simulator import (
    DetectionReport,
    GroundTruth,
    Scenario,
    Segment,
    evaluate_detection,
    scenario_from_json,
    simulate,
    trace_comment,
    truth_from_json,
    truth_to_json,
)
from ecoprobe.trace_io import parse_trace, serialize_trace


def trip(start_s: float, end_s: float, miles: float = 5.0) -> Trip:
    base = 1_700_000_000_000
    return Trip(
        id=f"x{start_s}",
        start_ts=base + int(start_s * 1000),
        end_ts=base + int(end_s * 1000),
        origin=GeoPoint(0.0, 0.0),
        destination=GeoPoint(0.0, 0.0),
        distance_miles=miles,
        mode=TripMode.AUTOMOTIVE,
    )


def test_single_drive_truth_distance():
    sc = Scenario(seed=1, segments=(Segment("drive", 600, 15.0, 90.0),))
    _, truth = simulate(sc)
    assert len(truth.trips) == 1
    assert truth.trips[0].distance_miles == pytest.approx(5.592, abs=0.001)
    assert truth.trips[0].distance_miles == pytest.approx(9000.0 / 1609.344, rel=1e-12)


def test_idle_only_scenario_has_no_truth_trips():
    sc = Scenario(seed=2, segments=(Segment("idle", 300),))
    trace, truth = simulate(sc)
    assert truth.trips == ()
    assert len(trace.records) > 0


def test_same_seed_is_byte_identical():
    sc = Scenario(
        seed=42,
        segments=(Segment("drive", 300, 12.0, 45.0), Segment("idle", 200)),
        gps_noise_sigma_m=8.0,
    )
    a = serialize_trace(simulate(sc)[0], comment=trace_comment(sc))
    b = serialize_trace(simulate(sc)[0], comment=trace_comment(sc))
    assert a == b


def test_different_seeds_differ():
    base = dict(
        segments=(Segment("drive", 300, 12.0, 45.0),),
        gps_noise_sigma_m=8.0,
    )
    a = serialize_trace(simulate(Scenario(seed=1, **base))[0])
    b = serialize_trace(simulate(Scenario(seed=2, **base))[0])
    assert a != b


def test_noise_free_samples_lie_on_the_path():
    sc = Scenario(seed=5, segments=(Segment("drive", 100, 10.0, 0.0),), sample_period_s=10.0)
    trace, truth = simulate(sc)
    locs = [r.payload for r in trace.records if isinstance(r.payload, LocationSample)]
    # consecutive samples 10 s apart at 10 m/s: each leg is 100 m
    for a, b in zip(locs, locs[1:]):
        leg_m = haversine_miles(a.point, b.point) * 1609.344
        assert leg_m == pytest.approx(100.0, abs=0.01)
    # path sum equals the analytic distance
    total = sum(haversine_miles(a.point, b.point) for a, b in zip(locs, locs[1:]))
    assert total == pytest.approx(truth.trips[0].distance_miles, rel=1e-9)


def test_motion_samples_track_segment_kind():
    sc = Scenario(
        seed=6,
        segments=(Segment("walk", 60, 1.4, 0.0), Segment("idle", 60)),
        sample_period_s=30.0,
    )
    trace, _ = simulate(sc)
    activities = {r.payload.activity.value for r in trace.records if hasattr(r.payload, "activity")}
    assert activities == {"walking", "stationary"}


def test_trace_comment_records_prng_and_seed():
    sc = Scenario(seed=99, segments=(Segment("idle", 10),))
    comment = trace_comment(sc)
    assert "seed=99" in comment
    assert "prng=" in comment
    text = serialize_trace(simulate(sc)[0], comment=comment)
    assert text.startswith(f"# {comment}\n")
    parsed, skipped = parse_trace(text)
    assert skipped == 0


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario(seed=1, segments=())
    with pytest.raises(ValueError):
        Scenario(seed=1, segments=(Segment("idle", 10),), sample_period_s=0.0)
    with pytest.raises(ValueError):
        Scenario(seed=1, segments=(Segment("idle", 10),), gps_noise_sigma_m=-1.0)
    with pytest.raises(ValueError):
        Segment("teleport", 10)
    with pytest.raises(ValueError):
        Segment("drive", 0.0, 10.0)


# --- evaluate_detection -----------------------------------------------------------


def test_identical_lists_score_perfectly():
    trips = [trip(0, 600), trip(2000, 2600)]
    report = evaluate_detection(trips, trips)
    assert report.precision == 1.0
    assert report.recall == 1.0
    assert report.median_distance_error_fraction == 0.0
    assert report.matched == 2


def test_zero_detections_flagged():
    report = evaluate_detection([], [trip(0, 600)])
    assert report.recall == 0.0
    assert report.precision == 1.0
    assert report.zero_detections
    assert report.median_distance_error_fraction is None


def test_partial_overlap_below_threshold_is_unmatched():
    truth = [trip(0, 1000)]
    detected = [trip(0, 400)]  # 40% of the truth duration
    report = evaluate_detection(detected, truth, match_overlap=0.5)
    assert report.matched == 0
    assert report.precision == 0.0
    assert report.recall == 0.0


def test_partial_overlap_at_threshold_matches():
    truth = [trip(0, 1000)]
    detected = [trip(0, 500, miles=4.0)]
    report = evaluate_detection(detected, truth, match_overlap=0.5)
    assert report.matched == 1
    assert report.median_distance_error_fraction == pytest.approx(0.2)


def test_matching_is_one_to_one_in_time_order():
    truth = [trip(0, 600), trip(1000, 1600)]
    detected = [trip(0, 600), trip(300, 900, miles=2.0), trip(1000, 1600)]
    report = evaluate_detection(detected, truth)
    assert report.matched == 2
    assert report.precision == pytest.approx(2 / 3)
    assert report.recall == 1.0


def test_detection_report_is_a_value(rng):
    report = DetectionReport(1.0, 1.0, 0.0, 1, 1, 1, (0.0,))
    assert not report.zero_detections


# --- JSON sidecars -----------------------------------------------------------------


def test_truth_json_round_trip():
    sc = Scenario(
        seed=7,
        segments=(Segment("drive", 300, 10.0, 10.0), Segment("idle", 400), Segment("drive", 200, 20.0, 200.0)),
    )
    _, truth = simulate(sc)
    text = truth_to_json(truth)
    loaded = truth_from_json(text)
    assert len(loaded.trips) == len(truth.trips)
    for a, b in zip(loaded.trips, truth.trips):
        assert a.start_ts == b.start_ts
        assert a.end_ts == b.end_ts
        assert a.distance_miles == pytest.approx(b.distance_miles, rel=1e-12)
        assert a.mode == b.mode


def test_scenario_from_json_uses_explicit_seed():
    text = """{
      "segments": [
        {"kind": "drive", "duration_s": 600, "speed_mps": 15, "heading_deg": 90},
        {"kind": "idle", "duration_s": 300}
      ],
      "sample_period_s": 2.0,
      "gps_noise_sigma_m": 4.0
    }"""
    sc = scenario_from_json(text, seed=123)
    assert sc.seed == 123
    assert sc.segments[0].kind == "drive"
    assert sc.sample_period_s == 2.0
    assert sc.gps_noise_sigma_m == 4.0
