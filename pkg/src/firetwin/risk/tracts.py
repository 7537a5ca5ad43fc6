"""Per-tract incident aggregation and risk classification.

Tracts stay in lon/lat degrees throughout; containment only needs a
consistent planar reading of the coordinates, not true distances.
Classes are relative to the citywide mean rate, so scaling every
tract's rate by the same factor never changes any class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from firetwin.errors import MalformedFeed
from firetwin.geo.polygons import point_in_polygon, ring_bbox
from firetwin.ingest.models import FireIncident

# Bucket for incidents no tract contains; double underscores keep it
# from colliding with a real tract id.
UNASSIGNED = "__unassigned__"

RISK_CLASSES = ("below_average", "normal", "above_average")

BELOW_FRACTION = 0.75
ABOVE_FRACTION = 1.25


@dataclass(frozen=True)
class Tract:
    """One census tract: id, GeoJSON geometry, and projected parts.

    parts is a tuple of polygons, each a tuple of rings (exterior
    first), in lon/lat; bbox spans every part.
    """

    tract_id: str
    geometry: dict
    parts: tuple
    bbox: tuple[float, float, float, float]

    def contains(self, lon: float, lat: float) -> bool:
        x0, y0, x1, y1 = self.bbox
        if lon < x0 or lon > x1 or lat < y0 or lat > y1:
            return False
        return any(point_in_polygon(lon, lat, rings) for rings in self.parts)


@dataclass(frozen=True)
class TractRisk:
    tract_id: str
    polygon: dict
    count: int
    rate: float
    risk_class: str

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ValueError("count cannot be negative")
        if self.risk_class not in RISK_CLASSES:
            raise ValueError(f"risk_class {self.risk_class!r} not in {RISK_CLASSES}")


def _geometry_parts(geometry: dict) -> list:
    gtype = geometry.get("type")
    if gtype == "Polygon":
        return [geometry["coordinates"]]
    if gtype == "MultiPolygon":
        return list(geometry["coordinates"])
    return []


def load_tracts(source: str | Path, id_key: str = "tract_id") -> list[Tract]:
    """Read tract polygons from a GeoJSON FeatureCollection.

    Feature order is preserved; it is the tie-break order for
    incidents on shared edges. Features without the id property fall
    back to the feature id, then to their position.
    """
    try:
        doc = json.loads(Path(source).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedFeed(f"cannot read GeoJSON from {source}: {exc}") from exc
    if doc.get("type") != "FeatureCollection" or "features" not in doc:
        raise MalformedFeed(f"{source} is not a FeatureCollection")

    tracts = []
    for index, feature in enumerate(doc["features"]):
        geometry = feature.get("geometry") or {}
        props = feature.get("properties") or {}
        parts = _geometry_parts(geometry)
        if not parts:
            continue
        tract_id = props.get(id_key) or feature.get("id") or f"tract-{index}"
        rings_per_part = tuple(
            tuple(tuple((c[0], c[1]) for c in ring) for ring in part) for part in parts
        )
        boxes = [ring_bbox(part[0]) for part in rings_per_part]
        bbox = (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )
        tracts.append(
            Tract(tract_id=str(tract_id), geometry=geometry, parts=rings_per_part, bbox=bbox)
        )
    return tracts


def aggregate_by_tract(
    incidents: list[FireIncident],
    tracts: list[Tract],
    window: tuple[datetime, datetime],
) -> dict[str, int]:
    """Count window incidents per tract, first containing tract wins.

    The result has an entry for every tract (zero included) plus the
    UNASSIGNED bucket, so the values always sum to the number of
    incidents inside the window.
    """
    start, end = window
    if start >= end:
        raise ValueError("window start must precede end")
    counts = {t.tract_id: 0 for t in tracts}
    counts[UNASSIGNED] = 0
    for inc in incidents:
        if not (start <= inc.timestamp < end):
            continue
        for tract in tracts:
            if tract.contains(inc.lon, inc.lat):
                counts[tract.tract_id] += 1
                break
        else:
            counts[UNASSIGNED] += 1
    return counts


def classify(
    tracts: list[Tract],
    counts: dict[str, int],
    window: tuple[datetime, datetime],
    below_fraction: float = BELOW_FRACTION,
    above_fraction: float = ABOVE_FRACTION,
) -> list[TractRisk]:
    """Turn counts into rates and classes relative to the mean rate.

    A tract is below_average under below_fraction of the mean rate,
    above_average over above_fraction of it, normal otherwise. The
    unassigned bucket never participates in the statistics.
    """
    if not tracts:
        raise ValueError("classify needs at least one tract")
    start, end = window
    days = (end - start).total_seconds() / 86400.0
    if days <= 0:
        raise ValueError("window start must precede end")
    rates = {t.tract_id: counts.get(t.tract_id, 0) / days for t in tracts}
    mean = sum(rates.values()) / len(tracts)

    out = []
    for tract in tracts:
        rate = rates[tract.tract_id]
        if rate < below_fraction * mean:
            cls = "below_average"
        elif rate > above_fraction * mean:
            cls = "above_average"
        else:
            cls = "normal"
        out.append(
            TractRisk(
                tract_id=tract.tract_id,
                polygon=tract.geometry,
                count=counts.get(tract.tract_id, 0),
                rate=rate,
                risk_class=cls,
            )
        )
    return out


def risk_geojson(risks: list[TractRisk]) -> dict:
    """FeatureCollection with per-tract risk properties, UI-ready."""
    return {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "geometry": r.polygon,
                "properties": {
                    "tract_id": r.tract_id,
                    "count": r.count,
                    "rate": r.rate,
                    "risk_class": r.risk_class,
                },
            }
            for r in risks
        ],
    }
