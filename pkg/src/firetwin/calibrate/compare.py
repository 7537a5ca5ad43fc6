"""Footprint agreement between the voxel solver and the Gaussian plume.

The 3D footprint is the column maximum of the density grid: the area
where smoke is present overhead at more than the threshold, matching
the ground-experience semantics of the 2D footprint.  Area math runs
on a shared 2 m rasterization, trading exact polygon clipping for
robustness at negligible accuracy cost.
"""

import math
from dataclasses import dataclass

import numpy as np
from skimage import draw, measure

from firetwin.geo import LocalFrame, project_enu, unproject_enu
from firetwin.geo.voxel import OccupancyGrid

RASTER_CELL_M = 2.0

PolygonSet = list[list[tuple[float, float]]]


@dataclass(frozen=True)
class FootprintComparison:
    iou: float
    area_2d: float
    area_3d: float
    centroid_offset: float
    horizon: int

    def __post_init__(self) -> None:
        if not (0.0 <= self.iou <= 1.0) and not math.isnan(self.iou):
            raise ValueError(f"iou {self.iou} outside [0, 1]")
        if self.area_2d < 0 or self.area_3d < 0:
            raise ValueError("areas must be non-negative")


def footprint_of_3d(
    density: np.ndarray,
    grid: OccupancyGrid,
    threshold: float,
    frame: LocalFrame,
) -> PolygonSet:
    """Closed lon/lat rings around the column-max region above threshold.

    Disjoint smoke regions come back as separate rings; an empty result
    means nothing exceeds the threshold anywhere.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    column_max = density.max(axis=2)
    if float(column_max.max(initial=0.0)) <= threshold:
        return []
    padded = np.pad(column_max, 1)
    contours = measure.find_contours(padded, level=threshold)
    rings: PolygonSet = []
    for contour in contours:
        if len(contour) < 4:
            continue
        # padded index p samples the center of cell p-1
        xs = grid.x0 + (contour[:, 0] - 0.5) * grid.cell
        ys = grid.y0 + (contour[:, 1] - 0.5) * grid.cell
        # drop degenerate specks well below one grid cell
        if abs(_signed_area(xs, ys)) < 0.01 * grid.cell**2:
            continue
        if _signed_area(xs, ys) < 0:
            xs = xs[::-1]
            ys = ys[::-1]
        lat, lon = unproject_enu(xs, ys, frame)
        ring = [(float(lo), float(la)) for lo, la in zip(lon, lat)]
        if ring[0] != ring[-1]:
            ring.append(ring[0])
        rings.append(ring)
    return rings


def _signed_area(xs, ys) -> float:
    x = np.asarray(xs)
    y = np.asarray(ys)
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _rasterize(sets: list[PolygonSet]):
    """Shared-raster masks for several polygon sets, plus the cell area."""
    pts = [p for s in sets for ring in s for p in ring]
    if not pts:
        return [np.zeros((1, 1), dtype=bool) for _ in sets], RASTER_CELL_M**2, None
    lons = [p[0] for p in pts]
    lats = [p[1] for p in pts]
    frame = LocalFrame.at((min(lats) + max(lats)) / 2, (min(lons) + max(lons)) / 2)
    projected = []
    for s in sets:
        proj_rings = []
        for ring in s:
            lon = np.array([p[0] for p in ring])
            lat = np.array([p[1] for p in ring])
            x, y = project_enu(lat, lon, frame)
            proj_rings.append((np.atleast_1d(x), np.atleast_1d(y)))
        projected.append(proj_rings)
    all_x = np.concatenate([x for s in projected for x, _ in s] or [np.zeros(1)])
    all_y = np.concatenate([y for s in projected for _, y in s] or [np.zeros(1)])
    x_min, y_min = all_x.min() - RASTER_CELL_M, all_y.min() - RASTER_CELL_M
    n_cols = int(math.ceil((all_x.max() - x_min) / RASTER_CELL_M)) + 2
    n_rows = int(math.ceil((all_y.max() - y_min) / RASTER_CELL_M)) + 2
    masks = []
    for proj_rings in projected:
        mask = np.zeros((n_rows, n_cols), dtype=bool)
        for x, y in proj_rings:
            rr, cc = draw.polygon(
                (y - y_min) / RASTER_CELL_M,
                (x - x_min) / RASTER_CELL_M,
                shape=mask.shape,
            )
            mask[rr, cc] = True
        masks.append(mask)
    return masks, RASTER_CELL_M**2, (frame, x_min, y_min)


def iou(a: PolygonSet, b: PolygonSet) -> float:
    """Area of intersection over union on the shared 2 m raster.

    Two empty sets agree vacuously and score 1; one empty set scores 0.
    """
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    (mask_a, mask_b), _cell_area, _ = _rasterize([a, b])
    union = np.count_nonzero(mask_a | mask_b)
    if union == 0:
        return 1.0
    inter = np.count_nonzero(mask_a & mask_b)
    return inter / union


def compare_footprints(a: PolygonSet, b: PolygonSet, horizon: int) -> FootprintComparison:
    """Full agreement report; a is the 2D reference, b the 3D footprint."""
    if not a and not b:
        return FootprintComparison(1.0, 0.0, 0.0, 0.0, horizon)
    masks, cell_area, _ = _rasterize([a, b])
    mask_a, mask_b = masks
    area_a = float(np.count_nonzero(mask_a)) * cell_area
    area_b = float(np.count_nonzero(mask_b)) * cell_area
    union = np.count_nonzero(mask_a | mask_b)
    inter = np.count_nonzero(mask_a & mask_b)
    score = 1.0 if union == 0 else inter / union
    if mask_a.any() and mask_b.any():
        ra, ca = np.nonzero(mask_a)
        rb, cb = np.nonzero(mask_b)
        offset = RASTER_CELL_M * math.hypot(
            float(ra.mean() - rb.mean()), float(ca.mean() - cb.mean())
        )
    else:
        offset = math.nan
    return FootprintComparison(score, area_a, area_b, offset, horizon)
