"""Historical fire-risk aggregation: tract classes and hourly patterns."""

from firetwin.risk.hours import TimeRule, hourly_histogram, local_hour
from firetwin.risk.tracts import (
    ABOVE_FRACTION,
    BELOW_FRACTION,
    RISK_CLASSES,
    UNASSIGNED,
    Tract,
    TractRisk,
    aggregate_by_tract,
    classify,
    load_tracts,
    risk_geojson,
)

__all__ = [
    "ABOVE_FRACTION",
    "BELOW_FRACTION",
    "RISK_CLASSES",
    "UNASSIGNED",
    "TimeRule",
    "Tract",
    "TractRisk",
    "aggregate_by_tract",
    "classify",
    "hourly_histogram",
    "load_tracts",
    "local_hour",
    "risk_geojson",
]
