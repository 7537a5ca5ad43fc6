"""KML and GeoJSON serialization of plume footprints.

Serialization is hand-rolled string assembly with fixed float formats
so identical footprints always produce identical bytes.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from firetwin.plume2d.footprint import PlumeFootprint

# KML colors are aabbggrr; semi-transparent green/yellow/orange/red
# assigned to thresholds in ascending order.
_BAND_FILL = ("7f00ff00", "7f00ffff", "7f007fff", "7f0000ff")
_BAND_LINE = ("ff00aa00", "ff00aaaa", "ff0055aa", "ff0000aa")


def _band_index(threshold: float, footprint: PlumeFootprint) -> int:
    ordered = sorted(t for t, _ in footprint.isopleths)
    return min(ordered.index(threshold), len(_BAND_FILL) - 1)


def export_kml(footprint: PlumeFootprint) -> str:
    """KML 2.2 document, one placemark per non-empty isopleth."""
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<kml xmlns="http://www.opengis.net/kml/2.2">',
        "<Document>",
        f"<name>{escape(f'smoke footprint {footprint.horizon_h} h')}</name>",
        "<description>"
        + escape(
            f"generated {footprint.generated_at.isoformat()}; "
            f"calm wind: {str(footprint.params.calm).lower()}"
        )
        + "</description>",
    ]
    for i, (fill, line) in enumerate(zip(_BAND_FILL, _BAND_LINE)):
        lines.append(
            f'<Style id="band{i}"><LineStyle><color>{line}</color>'
            f"<width>1.5</width></LineStyle>"
            f"<PolyStyle><color>{fill}</color></PolyStyle></Style>"
        )
    for threshold, ring in footprint.isopleths:
        if not ring:
            continue
        coords = " ".join(f"{lon:.6f},{lat:.6f},0" for lon, lat in ring)
        lines.extend(
            [
                "<Placemark>",
                f"<name>{escape(f'PM2.5 {threshold:g} ug/m3')}</name>",
                f"<styleUrl>#band{_band_index(threshold, footprint)}</styleUrl>",
                "<Polygon><tessellate>1</tessellate><outerBoundaryIs><LinearRing>",
                f"<coordinates>{coords}</coordinates>",
                "</LinearRing></outerBoundaryIs></Polygon>",
                "</Placemark>",
            ]
        )
    lines.extend(["</Document>", "</kml>"])
    return "\n".join(lines) + "\n"


def export_geojson(footprint: PlumeFootprint) -> dict:
    """FeatureCollection, one feature per non-empty isopleth."""
    generated = footprint.generated_at.isoformat()
    features = []
    for threshold, ring in footprint.isopleths:
        if not ring:
            continue
        features.append(
            {
                "type": "Feature",
                "properties": {
                    "threshold_ugm3": threshold,
                    "horizon_hours": footprint.horizon_h,
                    "generated_at": generated,
                },
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[[lon, lat] for lon, lat in ring]],
                },
            }
        )
    return {
        "type": "FeatureCollection",
        "metadata": {
            "horizon_hours": footprint.horizon_h,
            "generated_at": generated,
            "calm": footprint.params.calm,
            "thresholds": [t for t, _ in footprint.isopleths],
        },
        "features": features,
    }
