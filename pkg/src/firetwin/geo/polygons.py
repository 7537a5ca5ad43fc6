"""Point-in-polygon tests and small polygon utilities.

Polygons follow the GeoJSON convention: a polygon is a list of rings,
the first exterior and the rest holes; a ring is a sequence of (x, y)
pairs. Containment is even-odd ray casting with boundary points counted
as inside, so an incident on a shared tract edge lands in the first
tract tested rather than none.
"""

from __future__ import annotations

import numpy as np

from firetwin.errors import DegeneratePolygon

_EDGE_EPS = 1e-12


def _on_segment(px: float, py: float, ax: float, ay: float, bx: float, by: float) -> bool:
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    scale = max(abs(bx - ax), abs(by - ay), 1.0)
    if abs(cross) > _EDGE_EPS * scale:
        return False
    dot = (px - ax) * (bx - ax) + (py - ay) * (by - ay)
    return -_EDGE_EPS <= dot <= (bx - ax) ** 2 + (by - ay) ** 2 + _EDGE_EPS


def _ring_points(ring) -> np.ndarray:
    pts = np.asarray(ring, dtype=float)
    if pts.ndim != 2 or pts.shape[1] < 2:
        raise DegeneratePolygon("ring must be a sequence of coordinate pairs")
    # drop an explicit closing vertex
    if len(pts) > 1 and np.allclose(pts[0], pts[-1]):
        pts = pts[:-1]
    if len(pts) < 3:
        raise DegeneratePolygon(f"ring has {len(pts)} distinct vertices, need 3")
    return pts


def point_in_polygon(x: float, y: float, rings) -> bool:
    """Even-odd containment of point (x, y) in a polygon with holes.

    Boundary points count as inside, including hole boundaries.
    """
    all_pts = [_ring_points(r) for r in rings]

    # cheap bounding-box rejection over the exterior ring
    ext = all_pts[0]
    if (
        x < ext[:, 0].min() or x > ext[:, 0].max()
        or y < ext[:, 1].min() or y > ext[:, 1].max()
    ):
        return False

    inside = False
    for pts in all_pts:
        n = len(pts)
        for i in range(n):
            ax, ay = pts[i, 0], pts[i, 1]
            bx, by = pts[(i + 1) % n, 0], pts[(i + 1) % n, 1]
            if _on_segment(x, y, ax, ay, bx, by):
                return True
            if (ay > y) != (by > y):
                t = (y - ay) / (by - ay)
                if x < ax + t * (bx - ax):
                    inside = not inside
    return inside


def ring_area(ring) -> float:
    """Unsigned shoelace area of a single ring."""
    pts = _ring_points(ring)
    x = pts[:, 0]
    y = pts[:, 1]
    return abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))) / 2.0


def ring_bbox(ring) -> tuple[float, float, float, float]:
    pts = _ring_points(ring)
    return (
        float(pts[:, 0].min()),
        float(pts[:, 1].min()),
        float(pts[:, 0].max()),
        float(pts[:, 1].max()),
    )
