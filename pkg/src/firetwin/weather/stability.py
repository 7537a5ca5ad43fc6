"""Pasquill stability class from wind, sun, and cloud cover.

Turner (1964) style surface lookup for open country. Daytime insolation
is banded from solar elevation (strong >= 60 deg, moderate 35-60,
slight below 35) and knocked down one band under broken cloud. Full
overcast is neutral D whatever else holds, and so is any wind of
6 m/s or more.
"""

from __future__ import annotations

import math

from firetwin.weather.models import PasquillClass, WeatherSample

_A = PasquillClass.A
_B = PasquillClass.B
_C = PasquillClass.C
_D = PasquillClass.D
_E = PasquillClass.E
_F = PasquillClass.F

# (upper wind bound m/s, (strong, moderate, slight))
_DAY_ROWS = (
    (2.0, (_A, _A, _B)),
    (3.0, (_A, _B, _C)),
    (5.0, (_B, _B, _C)),
    (6.0, (_C, _C, _D)),
    (math.inf, (_D, _D, _D)),
)

# (upper wind bound m/s, (cloud >= 0.5, clearer))
_NIGHT_ROWS = (
    (2.0, (_E, _F)),
    (3.0, (_E, _F)),
    (5.0, (_D, _E)),
    (6.0, (_D, _D)),
    (math.inf, (_D, _D)),
)

OVERCAST_FRACTION = 0.875  # 7/8 cover: neutral day and night
BROKEN_FRACTION = 0.5

STRONG_ELEVATION_DEG = 60.0
MODERATE_ELEVATION_DEG = 35.0


def _row(rows, speed: float):
    for bound, classes in rows:
        if speed < bound:
            return classes
    return rows[-1][1]


def stability_class(sample: WeatherSample, solar_elevation: float) -> PasquillClass:
    """Deterministic class for any speed >= 0, elevation, cloud in [0, 1]."""
    if sample.cloud_cover >= OVERCAST_FRACTION:
        return _D

    if solar_elevation > 0:
        if solar_elevation >= STRONG_ELEVATION_DEG:
            band = 0
        elif solar_elevation >= MODERATE_ELEVATION_DEG:
            band = 1
        else:
            band = 2
        if sample.cloud_cover >= BROKEN_FRACTION:
            band = min(band + 1, 2)
        return _row(_DAY_ROWS, sample.wind_speed)[band]

    col = 0 if sample.cloud_cover >= BROKEN_FRACTION else 1
    return _row(_NIGHT_ROWS, sample.wind_speed)[col]
