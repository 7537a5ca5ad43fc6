"""Tract aggregation, risk classes, and hourly statistics.

The fixture tracts are axis-aligned rectangles, so the randomized
aggregation test can use direct interval arithmetic as its oracle
instead of any shared point-in-polygon code.
"""

import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from firetwin.errors import MalformedFeed
from firetwin.ingest.models import FireIncident
from firetwin.risk import (
    UNASSIGNED,
    TimeRule,
    TractRisk,
    aggregate_by_tract,
    classify,
    hourly_histogram,
    load_tracts,
    local_hour,
    risk_geojson,
)

FIXTURE = Path(__file__).parent.parent / "fixtures" / "tracts" / "austin.json"

WINDOW = (
    datetime(2025, 1, 1, tzinfo=timezone.utc),
    datetime(2026, 1, 1, tzinfo=timezone.utc),
)


def incident(lat, lon, ts=None, n=[0]):
    n[0] += 1
    return FireIncident(
        id=f"inc-{n[0]}",
        city="austin",
        name="BRUSH FIRE",
        timestamp=ts or datetime(2025, 6, 1, 12, 0, tzinfo=timezone.utc),
        lat=lat,
        lon=lon,
        address="100 MAIN ST",
        department="AFD",
    )


@pytest.fixture(scope="module")
def tracts():
    return load_tracts(FIXTURE)


def test_load_tracts_fixture(tracts):
    assert len(tracts) == 17
    ids = [t.tract_id for t in tracts]
    assert len(set(ids)) == 17
    split = next(t for t in tracts if t.tract_id == "48453-9901")
    assert len(split.parts) == 2
    assert split.contains(-97.7025, 30.25)
    assert split.contains(-97.6775, 30.25)
    assert not split.contains(-97.694, 30.25)  # gap between the parts


def test_load_tracts_rejects_non_collection(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"type": "Feature"}')
    with pytest.raises(MalformedFeed):
        load_tracts(p)


def test_aggregate_zero_incidents(tracts):
    counts = aggregate_by_tract([], tracts, WINDOW)
    assert all(v == 0 for v in counts.values())
    assert set(counts) == {t.tract_id for t in tracts} | {UNASSIGNED}


def test_aggregate_centroid_burst(tracts):
    # 100 incidents at one tract's center land in exactly that tract
    incs = [incident(30.25, -97.75) for _ in range(100)]
    counts = aggregate_by_tract(incs, tracts, WINDOW)
    hot = [tid for tid, c in counts.items() if c > 0]
    assert hot == ["48453-0010"]
    assert counts["48453-0010"] == 100


def test_aggregate_window_filters(tracts):
    inside = incident(30.25, -97.75, ts=datetime(2025, 3, 1, tzinfo=timezone.utc))
    before = incident(30.25, -97.75, ts=datetime(2024, 12, 31, tzinfo=timezone.utc))
    at_end = incident(30.25, -97.75, ts=WINDOW[1])
    counts = aggregate_by_tract([inside, before, at_end], tracts, WINDOW)
    assert sum(counts.values()) == 1


def test_aggregate_rejects_empty_window(tracts):
    with pytest.raises(ValueError):
        aggregate_by_tract([], tracts, (WINDOW[1], WINDOW[0]))


def _oracle_assign(lon, lat):
    # interval arithmetic over the fixture's known rectangles, in
    # feature order: 4x4 grid then the two-part tract
    lon0, lat0, d = -97.80, 30.22, 0.02
    n = 0
    for i in range(4):
        for j in range(4):
            n += 1
            x, y = lon0 + i * d, lat0 + j * d
            if x <= lon <= x + d and y <= lat <= y + d:
                return f"48453-{n:04d}"
    for x in (-97.71, -97.685):
        if x <= lon <= x + 0.015 and 30.24 <= lat <= 30.26:
            return "48453-9901"
    return UNASSIGNED


def test_aggregate_matches_bruteforce_on_random_set(tracts):
    rng = random.Random(42)
    incs = []
    expected = {t.tract_id: 0 for t in tracts}
    expected[UNASSIGNED] = 0
    while len(incs) < 1000:
        lon = rng.uniform(-97.82, -97.66)
        lat = rng.uniform(30.20, 30.32)
        # stay off the rectangle edges where open/closed conventions
        # could differ between oracle and implementation
        if min(abs((lon - -97.80) % 0.02), abs((lat - 30.22) % 0.02)) < 1e-5:
            continue
        ts = WINDOW[0] + timedelta(seconds=rng.randrange(0, 365 * 86400))
        incs.append(incident(lat, lon, ts=ts))
        expected[_oracle_assign(lon, lat)] += 1
    counts = aggregate_by_tract(incs, tracts, WINDOW)
    assert counts == expected
    assert sum(counts.values()) == 1000


def test_classify_equal_rates_all_normal(tracts):
    counts = {t.tract_id: 3 for t in tracts}
    risks = classify(tracts, counts, WINDOW)
    assert all(r.risk_class == "normal" for r in risks)


def test_classify_hotspot_and_empties(tracts):
    counts = {t.tract_id: 0 for t in tracts}
    counts[tracts[0].tract_id] = 50
    risks = classify(tracts, counts, WINDOW)
    by_id = {r.tract_id: r for r in risks}
    assert by_id[tracts[0].tract_id].risk_class == "above_average"
    assert all(
        by_id[t.tract_id].risk_class == "below_average" for t in tracts[1:]
    )


def test_classify_threshold_arithmetic(tracts):
    # rates 1, 1, 4 per day with mean 2: cutoffs at 1.5 and 2.5
    three = tracts[:3]
    days = 10
    window = (WINDOW[0], WINDOW[0] + timedelta(days=days))
    counts = {
        three[0].tract_id: 1 * days,
        three[1].tract_id: 1 * days,
        three[2].tract_id: 4 * days,
    }
    risks = classify(three, counts, window)
    assert [r.risk_class for r in risks] == [
        "below_average",
        "below_average",
        "above_average",
    ]
    assert risks[2].rate == pytest.approx(4.0)


@pytest.mark.parametrize("scale", [2, 7, 100])
def test_classify_scale_invariant(tracts, scale):
    rng = random.Random(7)
    base = {t.tract_id: rng.randrange(0, 20) for t in tracts}
    scaled = {tid: c * scale for tid, c in base.items()}
    ref = [r.risk_class for r in classify(tracts, base, WINDOW)]
    got = [r.risk_class for r in classify(tracts, scaled, WINDOW)]
    assert got == ref


def test_classify_requires_tracts():
    with pytest.raises(ValueError):
        classify([], {}, WINDOW)


def test_tract_risk_validation(tracts):
    with pytest.raises(ValueError):
        TractRisk(
            tract_id="x", polygon={}, count=-1, rate=0.0, risk_class="normal"
        )
    with pytest.raises(ValueError):
        TractRisk(tract_id="x", polygon={}, count=0, rate=0.0, risk_class="extreme")


def test_risk_geojson_shape(tracts):
    counts = {t.tract_id: 1 for t in tracts}
    doc = risk_geojson(classify(tracts, counts, WINDOW))
    assert doc["type"] == "FeatureCollection"
    assert len(doc["features"]) == len(tracts)
    f = doc["features"][0]
    assert f["geometry"]["type"] in ("Polygon", "MultiPolygon")
    assert set(f["properties"]) == {"tract_id", "count", "rate", "risk_class"}


# --- local-hour statistics ---

AUSTIN_RULE = TimeRule(std_offset_h=-6.0, uses_dst=True)


def test_histogram_empty():
    assert hourly_histogram([], AUSTIN_RULE) == [0] * 24


def test_histogram_all_at_17_local():
    # winter: 23:00 UTC is 17:00 CST; summer: 22:00 UTC is 17:00 CDT
    incs = [
        incident(30.25, -97.75, ts=datetime(2025, 1, 15, 23, 0, tzinfo=timezone.utc))
        for _ in range(5)
    ] + [
        incident(30.25, -97.75, ts=datetime(2025, 7, 15, 22, 0, tzinfo=timezone.utc))
        for _ in range(5)
    ]
    hist = hourly_histogram(incs, AUSTIN_RULE)
    assert hist[17] == 10
    assert sum(hist) == 10


def test_histogram_evening_weighted_peak():
    rng = random.Random(3)
    incs = []
    for _ in range(400):
        if rng.random() < 0.6:
            hour = rng.randrange(17, 23)  # evening burden
        else:
            hour = rng.randrange(0, 24)
        local = datetime(2025, 1, 10, hour, 30)
        utc = local + timedelta(hours=6)  # winter, CST
        incs.append(incident(30.25, -97.75, ts=utc.replace(tzinfo=timezone.utc)))
    hist = hourly_histogram(incs, AUSTIN_RULE)
    assert sum(hist) == 400
    assert 17 <= hist.index(max(hist)) <= 22


def test_dst_transitions():
    # US 2025: DST starts Mar 9 (02:00 standard), ends Nov 2 (02:00 daylight)
    before = datetime(2025, 3, 9, 7, 59, tzinfo=timezone.utc)  # 01:59 CST
    after = datetime(2025, 3, 9, 8, 0, tzinfo=timezone.utc)  # jumps to 03:00
    assert local_hour(before, AUSTIN_RULE) == 1
    assert local_hour(after, AUSTIN_RULE) == 3

    first_0130 = datetime(2025, 11, 2, 6, 30, tzinfo=timezone.utc)  # 01:30 CDT
    second_0130 = datetime(2025, 11, 2, 7, 30, tzinfo=timezone.utc)  # 01:30 CST
    assert local_hour(first_0130, AUSTIN_RULE) == 1
    assert local_hour(second_0130, AUSTIN_RULE) == 1


def test_rule_without_dst_fixed_offset():
    rule = TimeRule(std_offset_h=-7.0, uses_dst=False)
    summer = datetime(2025, 7, 1, 0, 0, tzinfo=timezone.utc)
    assert local_hour(summer, rule) == 17
