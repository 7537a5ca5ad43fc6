"""PM2.5 to AQI conversion.

Anchors transcribed from the EPA AQI breakpoint table for PM2.5
(24-hour, 2012 standard): 12.0/35.4/55.4/150.4/250.4/350.4/500.4 µg/m³
map to index 50/100/150/200/300/400/500. The published table uses
disjoint bands whose index jumps by 1 between them; connecting the
anchors instead keeps the mapping continuous and monotone, and differs
from the stepped table by under one index point everywhere.
"""

from __future__ import annotations

import math

from firetwin.errors import NegativeInput

# (concentration µg/m³, AQI) anchor points, strictly increasing
AQI_ANCHORS = (
    (0.0, 0.0),
    (12.0, 50.0),
    (35.4, 100.0),
    (55.4, 150.0),
    (150.4, 200.0),
    (250.4, 300.0),
    (350.4, 400.0),
    (500.4, 500.0),
)

AQI_MAX = 500.0


def pm25_to_aqi(pm25: float) -> float:
    """AQI for a PM2.5 concentration; values past the table clamp to 500."""
    if not math.isfinite(pm25) or pm25 < 0:
        raise NegativeInput(f"pm25 {pm25} must be finite and non-negative")
    if pm25 >= AQI_ANCHORS[-1][0]:
        return AQI_MAX
    for (c_lo, a_lo), (c_hi, a_hi) in zip(AQI_ANCHORS, AQI_ANCHORS[1:]):
        if pm25 <= c_hi:
            return a_lo + (a_hi - a_lo) * (pm25 - c_lo) / (c_hi - c_lo)
    return AQI_MAX
