"""Thresholded plume footprints as lon/lat polygons.

Concentration is sampled on a wind-aligned grid, level sets extracted
by marching squares, then rotated into world coordinates and projected
to geographic degrees. The grid depends only on the scalar plume
parameters, so rotating the wind rotates the output polygons exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np
from skimage import measure

from firetwin.geo.frame import LocalFrame, unproject_enu
from firetwin.plume2d.model import (
    DEFAULT_THRESHOLDS,
    PlumeParams,
    centerline_extent,
    concentration,
    effective_sigmas,
)

GRID_NX = 100
GRID_NY = 60
MAX_RING_VERTICES = 200  # closing duplicate included
_EXTENT_MARGIN = 1.15
_MIN_EXTENT_M = 50.0


@dataclass(frozen=True)
class PlumeFootprint:
    """Isopleths for one horizon, ordered by descending threshold.

    Each entry is (threshold µg/m³, ring); a ring is a tuple of
    (lon, lat) pairs with first == last, or empty when the threshold
    exceeds the sampled maximum. Nesting of successive thresholds holds
    up to one sampling cell, the polygonization tolerance.
    """

    horizon_h: int
    isopleths: tuple
    generated_at: datetime
    params: PlumeParams


def _rdp_keep(px, py, eps: float):
    """Douglas-Peucker keep mask over an open polyline."""
    n = len(px)
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, n - 1)]
    while stack:
        i, j = stack.pop()
        if j <= i + 1:
            continue
        ax, ay, bx, by = px[i], py[i], px[j], py[j]
        seg = math.hypot(bx - ax, by - ay)
        mx, my = px[i + 1 : j], py[i + 1 : j]
        if seg < 1e-12:
            d = np.hypot(mx - ax, my - ay)
        else:
            d = np.abs((bx - ax) * (ay - my) - (ax - mx) * (by - ay)) / seg
        k = int(np.argmax(d))
        if d[k] > eps:
            m = i + 1 + k
            keep[m] = True
            stack.append((i, m))
            stack.append((m, j))
    return keep


def _ring_from_contour(contour, xs, ys, params: PlumeParams, frame: LocalFrame):
    dx = xs[1] - xs[0]
    dy = ys[1] - ys[0]
    # padded array index -> plume-frame meters (pad ring occupied index 0)
    px = xs[0] + (contour[:, 1] - 1.0) * dx
    py = ys[0] + (contour[:, 0] - 1.0) * dy
    closed = len(px) > 1 and px[0] == px[-1] and py[0] == py[-1]
    if closed:
        px, py = px[:-1], py[:-1]
    if len(px) < 3:
        return ()

    # orient counterclockwise
    area2 = float(np.dot(px, np.roll(py, -1)) - np.dot(py, np.roll(px, -1)))
    if area2 < 0:
        px, py = px[::-1], py[::-1]

    # simplify: straight runs collapse to their endpoints, corners stay
    # within a fraction of a sampling cell of the raw contour
    loop_x = np.append(px, px[0])
    loop_y = np.append(py, py[0])
    keep = _rdp_keep(loop_x, loop_y, 0.35 * min(abs(dx), abs(dy)))[:-1]
    px, py = px[keep], py[keep]
    if len(px) < 3:
        return ()

    if len(px) > MAX_RING_VERTICES - 1:
        idx = np.unique(np.linspace(0, len(px) - 1, MAX_RING_VERTICES - 1).astype(int))
        px, py = px[idx], py[idx]

    wx, wy = params.wind_toward
    sx, sy = params.source
    world_x = sx + px * wx - py * wy
    world_y = sy + px * wy + py * wx
    lat, lon = unproject_enu(world_x, world_y, frame)
    ring = [(float(lo), float(la)) for lo, la in zip(lon, lat)]
    ring.append(ring[0])
    return tuple(ring)


def _largest_contour(contours):
    best, best_area = None, -1.0
    for c in contours:
        r, q = c[:, 0], c[:, 1]
        area = abs(float(np.dot(r, np.roll(q, -1)) - np.dot(q, np.roll(r, -1))))
        if area > best_area:
            best, best_area = c, area
    return best


def isopleths(
    params: PlumeParams,
    thresholds=DEFAULT_THRESHOLDS,
    horizon_h: int = 1,
    frame: LocalFrame | None = None,
    generated_at: datetime | None = None,
) -> PlumeFootprint:
    """Level-set polygons of the ground concentration for one horizon.

    The plume is truncated at the travel distance u * horizon hours.
    frame defaults to one anchored at the source's lon/lat only when the
    source is the frame origin; pass it explicitly otherwise.
    """
    if not thresholds or any(t <= 0 for t in thresholds):
        raise ValueError("thresholds must be positive")
    if len(set(thresholds)) != len(thresholds):
        raise ValueError("thresholds must be distinct")
    if frame is None:
        raise ValueError("a LocalFrame is required to produce lon/lat polygons")
    if generated_at is None:
        generated_at = datetime.now(timezone.utc)

    tmin = min(thresholds)
    x_max = params.u * horizon_h * 3600.0
    extent = centerline_extent(params, tmin, x_max)
    extent = max(min(extent * _EXTENT_MARGIN, x_max), _MIN_EXTENT_M)

    xs = np.linspace(extent / GRID_NX, extent, GRID_NX)
    sy, _ = effective_sigmas(params, xs)
    ccl = concentration(params, xs, 0.0)
    ratio = np.maximum(ccl / tmin, 1.0)
    half = 1.2 * float(np.max(sy * np.sqrt(2.0 * np.log(ratio))))
    half = max(half, 2.0 * params.source_radius, 10.0)
    ys = np.linspace(-half, half, GRID_NY)

    field = concentration(params, xs[None, :], ys[:, None])
    padded = np.zeros((GRID_NY + 2, GRID_NX + 2))
    padded[1:-1, 1:-1] = field

    entries = []
    for t in sorted(thresholds, reverse=True):
        if float(field.max()) < t:
            entries.append((float(t), ()))
            continue
        contours = measure.find_contours(padded, float(t))
        best = _largest_contour(contours)
        ring = _ring_from_contour(best, xs, ys, params, frame) if best is not None else ()
        entries.append((float(t), ring))

    return PlumeFootprint(
        horizon_h=horizon_h,
        isopleths=tuple(entries),
        generated_at=generated_at,
        params=params,
    )
