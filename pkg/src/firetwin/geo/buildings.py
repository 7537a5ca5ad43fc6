"""Building footprints from GeoJSON FeatureCollections.

Footprint coordinates arrive as lon/lat and are projected into the
caller's local frame at load time so that downstream consumers only ever
see meters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from firetwin.errors import MalformedFeed
from firetwin.geo.frame import LocalFrame, project_enu
from firetwin.geo.polygons import point_in_polygon, ring_bbox

# Assumed storey height when only a floor count is present.
METERS_PER_LEVEL = 3.5
DEFAULT_HEIGHT_M = 8.0


@dataclass(frozen=True)
class Building:
    """One footprint: rings in local-frame meters plus a roof height."""

    rings: tuple
    height: float
    bbox: tuple[float, float, float, float]

    def contains(self, x: float, y: float) -> bool:
        x0, y0, x1, y1 = self.bbox
        if x < x0 or x > x1 or y < y0 or y > y1:
            return False
        return point_in_polygon(x, y, self.rings)


class BuildingSet:
    """All buildings in a scene, queryable by point."""

    def __init__(self, buildings: list[Building]):
        self.buildings = buildings

    def __len__(self) -> int:
        return len(self.buildings)

    def height_at(self, x: float, y: float) -> float:
        """Roof height above ground at (x, y), 0 outside every footprint."""
        best = 0.0
        for b in self.buildings:
            if b.height > best and b.contains(x, y):
                best = b.height
        return best


def _feature_height(props: dict) -> float:
    for key in ("height", "height_m", "building_height"):
        if key in props:
            try:
                h = float(props[key])
            except (TypeError, ValueError):
                continue
            if h > 0:
                return h
    for key in ("levels", "building_levels", "floors"):
        if key in props:
            try:
                n = float(props[key])
            except (TypeError, ValueError):
                continue
            if n > 0:
                return n * METERS_PER_LEVEL
    return DEFAULT_HEIGHT_M


def _project_ring(ring, frame: LocalFrame) -> tuple:
    out = []
    for lon, lat in ((c[0], c[1]) for c in ring):
        x, y = project_enu(lat, lon, frame)
        out.append((x, y))
    return tuple(out)


def _polygon_rings(geometry: dict) -> list[list]:
    gtype = geometry.get("type")
    if gtype == "Polygon":
        return [geometry["coordinates"]]
    if gtype == "MultiPolygon":
        return list(geometry["coordinates"])
    return []


def load_feature_polygons(source: str | Path, frame: LocalFrame) -> list[tuple[dict, tuple]]:
    """Read a GeoJSON FeatureCollection as (properties, projected rings) pairs.

    Non-polygonal features are skipped. MultiPolygons yield one pair per
    part so callers can treat every entry as a simple polygon with holes.
    """
    try:
        doc = json.loads(Path(source).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedFeed(f"cannot read GeoJSON from {source}: {exc}") from exc
    if doc.get("type") != "FeatureCollection" or "features" not in doc:
        raise MalformedFeed(f"{source} is not a FeatureCollection")

    out = []
    for feature in doc["features"]:
        geometry = feature.get("geometry") or {}
        props = feature.get("properties") or {}
        for poly in _polygon_rings(geometry):
            rings = tuple(_project_ring(r, frame) for r in poly)
            if rings:
                out.append((props, rings))
    return out


def load_buildings(source: str | Path, frame: LocalFrame) -> BuildingSet:
    buildings = []
    for props, rings in load_feature_polygons(source, frame):
        buildings.append(
            Building(rings=rings, height=_feature_height(props), bbox=ring_bbox(rings[0]))
        )
    return BuildingSet(buildings)
