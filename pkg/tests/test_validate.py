"""AQI conversion and sensor-based smoke detection tests."""

import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from firetwin.errors import InsufficientBaseline, MalformedFeed, NegativeInput
from firetwin.geo.frame import LocalFrame, unproject_enu
from firetwin.plume2d.footprint import isopleths
from firetwin.plume2d.model import concentration, make_params
from firetwin.validate import (
    AQI_ANCHORS,
    DetectionReport,
    SensorReading,
    detection_report,
    highest_band,
    load_readings,
    pm25_to_aqi,
    sensors_in_footprint,
)
from firetwin.weather.models import PasquillClass

FIXDIR = Path(__file__).parent.parent / "fixtures" / "sensors"


# --- AQI ---


def test_aqi_anchor_values_exact():
    for conc, index in AQI_ANCHORS:
        assert pm25_to_aqi(conc) == index


def test_aqi_zero():
    assert pm25_to_aqi(0.0) == 0.0


def test_aqi_good_band_midpoint():
    # hand arithmetic: halfway between anchors (12, 50) and (35.4, 100)
    assert pm25_to_aqi(23.7) == pytest.approx(75.0)


def test_aqi_interpolates_moderate_band():
    # 45.4 sits (45.4-35.4)/(55.4-35.4) = 0.5 into the 100..150 band
    assert pm25_to_aqi(45.4) == pytest.approx(125.0)


def test_aqi_clamps_above_table():
    assert pm25_to_aqi(500.4) == 500.0
    assert pm25_to_aqi(1200.0) == 500.0


def test_aqi_rejects_bad_input():
    with pytest.raises(NegativeInput):
        pm25_to_aqi(-0.1)
    with pytest.raises(NegativeInput):
        pm25_to_aqi(float("nan"))
    with pytest.raises(NegativeInput):
        pm25_to_aqi(float("inf"))


@given(
    st.floats(min_value=0.0, max_value=1000.0),
    st.floats(min_value=0.0, max_value=1000.0),
)
def test_aqi_monotone(a, b):
    lo, hi = sorted((a, b))
    assert pm25_to_aqi(lo) <= pm25_to_aqi(hi)


def test_aqi_continuous_at_breakpoints():
    for conc, _ in AQI_ANCHORS[1:]:
        below = pm25_to_aqi(conc - 1e-9)
        at = pm25_to_aqi(conc)
        assert at - below < 1e-5


# --- footprint containment ---

FRAME = LocalFrame.at(30.19, -97.82)
PARAMS = make_params(4.0e7, 4.0, (1.0, 0.0), PasquillClass.C, source_radius=20.0)
FOOTPRINT = isopleths(PARAMS, horizon_h=2, frame=FRAME)


def reading_at(x, y, sensor_id="s1", pm25=8.0, ts=None):
    lat, lon = unproject_enu(x, y, FRAME)
    return SensorReading(
        sensor_id=sensor_id,
        lat=lat,
        lon=lon,
        timestamp=ts or datetime(2025, 2, 10, 15, 0, tzinfo=timezone.utc),
        pm25=pm25,
    )


def test_no_sensors_empty():
    assert sensors_in_footprint([], FOOTPRINT) == []


def test_centerline_sensor_contained():
    r = reading_at(500.0, 0.0)
    got = sensors_in_footprint([r], FOOTPRINT)
    assert len(got) == 1
    _, band = got[0]
    # oracle: the model's own concentration exceeds the band threshold
    assert float(concentration(PARAMS, 500.0, 0.0)) >= band


def test_upwind_sensor_not_contained():
    r = reading_at(-400.0, 0.0)
    assert sensors_in_footprint([r], FOOTPRINT) == []
    assert highest_band(r.lon, r.lat, FOOTPRINT) is None


def test_highest_band_wins():
    # near the source every band contains the point; the label must be
    # the largest threshold, which the direct concentration confirms
    r = reading_at(300.0, 0.0)
    band = highest_band(r.lon, r.lat, FOOTPRINT)
    c = float(concentration(PARAMS, 300.0, 0.0))
    candidates = [t for t, ring in FOOTPRINT.isopleths if ring and c >= t]
    assert band == max(candidates)


# --- detection ---

EVENT = (
    datetime(2025, 2, 10, 18, 0, tzinfo=timezone.utc),
    datetime(2025, 2, 10, 20, 0, tzinfo=timezone.utc),
)


def series(sensor_id, x, y, baseline, event_peak):
    out = []
    t = EVENT[0] - timedelta(hours=3)
    while t < EVENT[1]:
        pm = baseline
        if EVENT[0] <= t and event_peak > baseline:
            pm = event_peak
        out.append(reading_at(x, y, sensor_id=sensor_id, pm25=pm, ts=t))
        t += timedelta(minutes=15)
    return out


def test_response_threshold_arithmetic():
    # baseline 8, event max 20: delta 12 beats max(5, 2)
    readings = series("s-yes", 500.0, 0.0, 8.0, 20.0)
    report = detection_report(readings, FOOTPRINT, EVENT)
    assert report.n_in_footprint == 1
    assert report.n_responding == 1
    d = report.sensors[0]
    assert d.baseline == pytest.approx(8.0)
    assert d.event_max == pytest.approx(20.0)
    assert d.responds


def test_small_rise_does_not_respond():
    # delta 4 fails the 5 ug/m3 floor
    readings = series("s-no", 500.0, 0.0, 8.0, 12.0)
    report = detection_report(readings, FOOTPRINT, EVENT)
    assert report.n_in_footprint == 1
    assert report.n_responding == 0


def test_relative_margin_guards_high_baselines():
    # delta 6 passes the floor but not 25% of a 40 ug/m3 baseline
    readings = series("s-rel", 500.0, 0.0, 40.0, 46.0)
    report = detection_report(readings, FOOTPRINT, EVENT)
    assert report.n_responding == 0


def test_sparsity_reported_not_raised():
    readings = series("s-far", -3000.0, 4000.0, 8.0, 8.0)
    report = detection_report(readings, FOOTPRINT, EVENT)
    assert report.n_sensors == 1
    assert report.n_in_footprint == 0
    assert report.sparse
    assert report.n_responding == 0


def test_insufficient_baseline_raises():
    readings = [
        r
        for r in series("s-short", 500.0, 0.0, 8.0, 20.0)
        if r.timestamp >= EVENT[0] - timedelta(minutes=90)
    ]
    with pytest.raises(InsufficientBaseline):
        detection_report(readings, FOOTPRINT, EVENT)


def test_report_invariant_to_ordering():
    readings = series("a", 500.0, 0.0, 8.0, 30.0) + series(
        "b", 900.0, 40.0, 6.0, 6.0
    )
    shuffled = readings[:]
    random.Random(5).shuffle(shuffled)
    assert detection_report(readings, FOOTPRINT, EVENT) == detection_report(
        shuffled, FOOTPRINT, EVENT
    )


def test_report_validates_counts():
    with pytest.raises(ValueError):
        DetectionReport(
            n_sensors=1, n_in_footprint=0, n_responding=1, sparse=True, sensors=()
        )


def test_prescribed_burn_fixture_three_of_four():
    scenario = json.loads((FIXDIR / "burn_scenario.json").read_text())
    readings = load_readings(FIXDIR / scenario["readings"])
    frame = LocalFrame.at(scenario["source"]["lat"], scenario["source"]["lon"])
    params = make_params(
        scenario["q_ugs"],
        scenario["wind_speed_ms"],
        tuple(scenario["wind_toward"]),
        PasquillClass(scenario["stability"]),
        source_radius=scenario["source_radius_m"],
    )
    footprint = isopleths(params, horizon_h=scenario["horizon_h"], frame=frame)
    window = (
        datetime.fromisoformat(scenario["event_start"]),
        datetime.fromisoformat(scenario["event_end"]),
    )
    report = detection_report(readings, footprint, window)
    assert report.n_in_footprint == scenario["expected"]["n_in_footprint"]
    assert report.n_responding == scenario["expected"]["n_responding"]
    responders = {d.sensor_id for d in report.sensors if d.responds}
    assert responders == {"pa-101", "pa-102", "pa-103"}
    silent = next(d for d in report.sensors if d.sensor_id == "pa-104")
    assert not silent.responds


def test_load_readings_rejects_bad_lines(tmp_path):
    p = tmp_path / "bad.ldjson"
    p.write_text('{"sensor_id": "x", "lat": 0, "lon": 0, "ts": "2025-01-01T00:00:00+00:00", "pm25": -3}\n')
    with pytest.raises(MalformedFeed):
        load_readings(p)
    p.write_text("not json\n")
    with pytest.raises(MalformedFeed):
        load_readings(p)
