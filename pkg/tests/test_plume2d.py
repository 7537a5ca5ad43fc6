"""Gaussian plume tests: sigma curves, concentrations, footprints, export."""

import math
import xml.etree.ElementTree as ET
from datetime import datetime, timezone

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from firetwin.errors import NonPositiveDownwind
from firetwin.geo import LocalFrame, point_in_polygon, project_enu
from firetwin.plume2d import (
    DEFAULT_PROFILE,
    DEFAULT_THRESHOLDS,
    PlumeParams,
    U_MIN,
    concentration,
    export_geojson,
    export_kml,
    isopleths,
    make_params,
    sigma,
)
from firetwin.weather.models import PasquillClass

CLASSES = list(PasquillClass)
FRAME = LocalFrame.at(30.2672, -97.7431)
GEN_AT = datetime(2023, 3, 6, 18, 0, tzinfo=timezone.utc)


# second transcription of the published coefficient table, used only as
# a cross-check against the implementation's copy
def _oracle_sigma(cls, x):
    a = {"A": 0.22, "B": 0.16, "C": 0.11, "D": 0.08, "E": 0.06, "F": 0.04}[cls.value]
    sy = a * x / math.sqrt(1 + 0.0001 * x)
    sz = {
        "A": lambda v: 0.20 * v,
        "B": lambda v: 0.12 * v,
        "C": lambda v: 0.08 * v / math.sqrt(1 + 0.0002 * v),
        "D": lambda v: 0.06 * v / math.sqrt(1 + 0.0015 * v),
        "E": lambda v: 0.03 * v / (1 + 0.0003 * v),
        "F": lambda v: 0.016 * v / (1 + 0.0003 * v),
    }[cls.value](x)
    return sy, sz


# ---------------------------------------------------------------- sigma

def test_nonpositive_downwind_rejected():
    with pytest.raises(NonPositiveDownwind):
        sigma(PasquillClass.D, 0.0)
    with pytest.raises(NonPositiveDownwind):
        sigma(PasquillClass.D, np.array([10.0, -1.0]))


def test_sigma_y_neutral_at_1km_in_expected_band():
    sy, _ = sigma(PasquillClass.D, 1000.0)
    assert 67.0 <= sy <= 77.0


def test_sigma_matches_independent_transcription():
    for cls in CLASSES:
        for x in (10.0, 100.0, 1000.0, 10000.0):
            sy, sz = sigma(cls, x)
            oy, oz = _oracle_sigma(cls, x)
            assert sy == pytest.approx(oy, rel=1e-12)
            assert sz == pytest.approx(oz, rel=1e-12)


@settings(max_examples=200)
@given(x=st.floats(1.0, 5e4), cls=st.sampled_from(CLASSES))
def test_sigma_strictly_increasing(x, cls):
    sy1, sz1 = sigma(cls, x)
    sy2, sz2 = sigma(cls, 2.0 * x)
    assert sy2 > sy1 and sz2 > sz1
    assert sy1 > 0 and sz1 > 0


@settings(max_examples=200)
@given(x=st.floats(1.0, 5e4))
def test_sigma_ordered_across_classes(x):
    sys_ = [sigma(c, x)[0] for c in CLASSES]
    szs = [sigma(c, x)[1] for c in CLASSES]
    assert all(a > b for a, b in zip(sys_, sys_[1:]))
    assert all(a > b for a, b in zip(szs, szs[1:]))


# -------------------------------------------------------- concentration

def _params(q=1e9, u=5.0, cls=PasquillClass.D, zi=1000.0, radius=0.0):
    return PlumeParams(
        q=q, u=u, stability=cls, source=(0.0, 0.0), wind_toward=(1.0, 0.0),
        mixing_height=zi, source_radius=radius,
    )


def test_centerline_value_matches_closed_form():
    p = _params()
    oy, oz = _oracle_sigma(PasquillClass.D, 1000.0)
    expected = 1e9 / (math.pi * 5.0 * oy * oz)
    assert concentration(p, 1000.0, 0.0) == pytest.approx(expected, rel=1e-9)


def test_crosswind_symmetry_and_decay():
    p = _params()
    assert concentration(p, 500.0, 120.0) == concentration(p, 500.0, -120.0)
    assert concentration(p, 500.0, 1e5) == pytest.approx(0.0, abs=1e-300)


def test_linear_in_emission_rate():
    a = concentration(_params(q=1e9), 800.0, 50.0)
    b = concentration(_params(q=2e9), 800.0, 50.0)
    assert b == pytest.approx(2.0 * a, rel=1e-12)


def test_upwind_is_zero():
    p = _params()
    assert concentration(p, -10.0, 0.0) == 0.0
    assert concentration(p, 0.0, 0.0) == 0.0


def test_centerline_monotone_decreasing():
    p = _params()
    xs = np.linspace(50.0, 20000.0, 400)
    c = concentration(p, xs, 0.0)
    assert np.all(np.diff(c) < 0)


def test_crosswind_flux_recovers_emission_rate():
    # tall mixing layer so the vertical profile stays Gaussian at x=800
    p = _params(zi=1e5)
    x = 800.0
    oy, oz = _oracle_sigma(PasquillClass.D, x)
    ys = np.linspace(-8 * oy, 8 * oy, 2001)
    zs = np.linspace(0.0, 8 * oz, 2001)
    c = concentration(p, x, ys[:, None], zs[None, :])
    flux = p.u * np.trapezoid(np.trapezoid(c, zs, axis=1), ys)
    assert flux == pytest.approx(p.q, rel=0.01)


def test_mixing_cap_continuous_at_switch():
    p = _params(zi=100.0)
    # solve sigma_z(x*) = 0.8 * zi by bisection on the oracle curve
    lo, hi = 10.0, 1e6
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _oracle_sigma(PasquillClass.D, mid)[1] < 80.0:
            lo = mid
        else:
            hi = mid
    before = concentration(p, lo * 0.999, 0.0)
    after = concentration(p, hi * 1.001, 0.0)
    assert after == pytest.approx(before, rel=0.01)


def test_mixed_layer_concentration_independent_of_height():
    p = _params(zi=100.0)
    x = 1e5  # far field, well past the switch
    c0 = concentration(p, x, 0.0, 0.0)
    c50 = concentration(p, x, 0.0, 50.0)
    c_above = concentration(p, x, 0.0, 150.0)
    assert c50 == pytest.approx(c0, rel=1e-12)
    assert c_above == 0.0


def test_make_params_floors_and_flags_calm():
    p = make_params(1e9, 0.2, (0.0, 0.0), PasquillClass.F)
    assert p.u == U_MIN and p.calm
    q = make_params(1e9, 3.0, (3.0, 4.0), PasquillClass.D)
    assert not q.calm
    assert math.hypot(*q.wind_toward) == pytest.approx(1.0)


def test_param_validation():
    with pytest.raises(ValueError):
        _params(q=0.0)
    with pytest.raises(ValueError):
        _params(zi=-5.0)
    with pytest.raises(ValueError):
        PlumeParams(q=1e9, u=5.0, stability=PasquillClass.D, source=(0, 0),
                    wind_toward=(3.0, 4.0))


def test_source_radius_widens_near_field():
    narrow = concentration(_params(), 50.0, 30.0)
    wide = concentration(_params(radius=20.0), 50.0, 30.0)
    assert wide > narrow


# ------------------------------------------------------------ emissions

def test_vegetation_emits_far_more_than_appliance():
    brush = DEFAULT_PROFILE.lookup("Brush Fire")
    appliance = DEFAULT_PROFILE.lookup("Appliance Fire")
    assert brush.q >= 10 * appliance.q


def test_lookup_is_case_insensitive_substring():
    assert DEFAULT_PROFILE.lookup("GRASS FIRE / WILDLAND") == DEFAULT_PROFILE.lookup("grass")
    assert DEFAULT_PROFILE.lookup("unknown thing") == DEFAULT_PROFILE.default


def test_all_profile_entries_positive():
    assert all(spec.q > 0 for _, spec in DEFAULT_PROFILE.patterns)
    assert DEFAULT_PROFILE.default.q > 0


# ------------------------------------------------------------ footprint

def _footprint(q=2e8, horizon=1, u=5.0, toward=(1.0, 0.0), thresholds=DEFAULT_THRESHOLDS):
    p = make_params(q, u, toward, PasquillClass.D, source=(0.0, 0.0), source_radius=10.0)
    return isopleths(p, thresholds, horizon, frame=FRAME, generated_at=GEN_AT)


def _ring_to_meters(ring):
    lons = np.array([v[0] for v in ring])
    lats = np.array([v[1] for v in ring])
    x, y = project_enu(lats, lons, FRAME)
    return np.column_stack([x, y])


def _ring_area_m2(ring):
    pts = _ring_to_meters(ring[:-1])
    x, y = pts[:, 0], pts[:, 1]
    return abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))) / 2.0


def test_footprint_thresholds_descending_and_rings_closed():
    fp = _footprint()
    ts = [t for t, _ in fp.isopleths]
    assert ts == sorted(ts, reverse=True)
    for _, ring in fp.isopleths:
        if ring:
            assert ring[0] == ring[-1]
            assert len(ring) <= 200


def test_threshold_above_max_is_empty():
    fp = _footprint(thresholds=(1e12,))
    assert fp.isopleths[0][1] == ()


def _dist_to_ring_m(pt, ring_m):
    a = ring_m[:-1]
    b = ring_m[1:]
    ab = b - a
    ap = pt - a
    denom = np.maximum((ab * ab).sum(axis=1), 1e-300)
    t = np.clip((ap * ab).sum(axis=1) / denom, 0.0, 1.0)
    closest = a + t[:, None] * ab
    return float(np.hypot(*(pt - closest).T.reshape(2, -1)).min())


def test_nested_thresholds_contained():
    fp = _footprint(thresholds=(12.0, 35.5))
    outer = dict(fp.isopleths)[12.0]
    inner = dict(fp.isopleths)[35.5]
    assert outer and inner
    outer_m = _ring_to_meters(outer)
    # polygonization tolerance: one sampling cell of the 100 x 60 grid
    extent = float(outer_m[:, 0].max())
    width = float(outer_m[:, 1].max() - outer_m[:, 1].min())
    tol = max(extent / 100.0, width / 59.0)
    for i, (lon, lat) in enumerate(inner[:-1]):
        if point_in_polygon(lon, lat, [list(outer[:-1])]):
            continue
        pt = _ring_to_meters([inner[i]])[0]
        assert _dist_to_ring_m(pt, outer_m) <= tol


def test_footprint_area_non_decreasing_in_horizon():
    # emission rate large enough that the 12 threshold is travel-limited
    areas = []
    for h in (1, 2, 3):
        fp = _footprint(q=5e10, horizon=h, thresholds=(12.0,))
        areas.append(_ring_area_m2(fp.isopleths[0][1]))
    assert areas[0] <= areas[1] <= areas[2]
    assert areas[2] > areas[0]


def test_travel_limited_extent_scales_with_horizon():
    ext = []
    for h in (1, 2):
        fp = _footprint(q=5e12, horizon=h, u=4.0, thresholds=(12.0,))
        pts = _ring_to_meters(fp.isopleths[0][1])
        ext.append(float(pts[:, 0].max()))
    assert ext[0] == pytest.approx(4.0 * 3600.0, rel=0.05)
    assert ext[1] == pytest.approx(2.0 * ext[0], rel=0.05)


def test_rotating_wind_rotates_footprint_vertexwise():
    theta = math.radians(50.0)
    base = _footprint(toward=(1.0, 0.0), thresholds=(35.5,))
    spun = _footprint(toward=(math.cos(theta), math.sin(theta)), thresholds=(35.5,))
    a = _ring_to_meters(base.isopleths[0][1])
    b = _ring_to_meters(spun.isopleths[0][1])
    assert len(a) == len(b)
    rot = np.array(
        [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
    )
    assert np.max(np.abs(a @ rot.T - b)) < 1e-3


def test_isopleths_validates_inputs():
    p = make_params(1e9, 5.0, (1.0, 0.0), PasquillClass.D)
    with pytest.raises(ValueError):
        isopleths(p, (12.0, 12.0), 1, frame=FRAME)
    with pytest.raises(ValueError):
        isopleths(p, (-5.0,), 1, frame=FRAME)
    with pytest.raises(ValueError):
        isopleths(p, (12.0,), 1, frame=None)


# --------------------------------------------------------------- export

def test_kml_structure_and_placemark_count():
    fp = _footprint(thresholds=(12.0, 35.5))
    doc = export_kml(fp)
    root = ET.fromstring(doc)
    assert root.tag == "{http://www.opengis.net/kml/2.2}kml"
    marks = root.findall(".//{http://www.opengis.net/kml/2.2}Placemark")
    assert len(marks) == sum(1 for _, r in fp.isopleths if r)
    coords = root.find(".//{http://www.opengis.net/kml/2.2}coordinates").text
    lon, lat, alt = (float(v) for v in coords.split()[0].split(","))
    assert -98.5 < lon < -97.0 and 29.5 < lat < 31.0 and alt == 0.0
    first, last = coords.split()[0], coords.split()[-1]
    assert first == last


def test_kml_byte_stable():
    a = export_kml(_footprint())
    b = export_kml(_footprint())
    assert a == b


def test_kml_empty_footprint_has_no_placemarks():
    doc = export_kml(_footprint(thresholds=(1e12,)))
    root = ET.fromstring(doc)
    assert root.findall(".//{http://www.opengis.net/kml/2.2}Placemark") == []


def test_geojson_features_and_metadata():
    fp = _footprint(thresholds=(12.0, 35.5))
    gj = export_geojson(fp)
    assert gj["type"] == "FeatureCollection"
    assert len(gj["features"]) == sum(1 for _, r in fp.isopleths if r)
    f = gj["features"][0]
    assert f["properties"]["horizon_hours"] == 1
    assert f["properties"]["threshold_ugm3"] == fp.isopleths[0][0]
    ring = f["geometry"]["coordinates"][0]
    assert ring[0] == ring[-1]
    assert gj["metadata"]["calm"] is False
