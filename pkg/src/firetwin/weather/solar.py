"""Solar elevation from the NOAA low-precision position formula.

Good to roughly half a degree, which is far finer than the insolation
bands that consume it.
"""

from __future__ import annotations

import math
from datetime import datetime, timezone


def solar_elevation_deg(lat: float, lon: float, when: datetime) -> float:
    """Sun elevation above the horizon in degrees at (lat, lon).

    lon is east-positive; naive datetimes are taken as UTC.
    """
    t = when if when.tzinfo is None else when.astimezone(timezone.utc)
    doy = t.timetuple().tm_yday
    hours = t.hour + t.minute / 60.0 + t.second / 3600.0

    g = 2.0 * math.pi / 365.0 * (doy - 1 + (hours - 12.0) / 24.0)
    eqtime = 229.18 * (
        0.000075
        + 0.001868 * math.cos(g)
        - 0.032077 * math.sin(g)
        - 0.014615 * math.cos(2 * g)
        - 0.040849 * math.sin(2 * g)
    )
    decl = (
        0.006918
        - 0.399912 * math.cos(g)
        + 0.070257 * math.sin(g)
        - 0.006758 * math.cos(2 * g)
        + 0.000907 * math.sin(2 * g)
        - 0.002697 * math.cos(3 * g)
        + 0.00148 * math.sin(3 * g)
    )

    # true solar time in minutes; hour angle in radians
    tst = hours * 60.0 + eqtime + 4.0 * lon
    ha = math.radians(tst / 4.0 - 180.0)

    phi = math.radians(lat)
    cos_zenith = math.sin(phi) * math.sin(decl) + math.cos(phi) * math.cos(
        decl
    ) * math.cos(ha)
    cos_zenith = min(1.0, max(-1.0, cos_zenith))
    return 90.0 - math.degrees(math.acos(cos_zenith))
