"""Rasterize terrain and buildings into a solid-cell occupancy grid.

A cell is solid when its center lies below the terrain surface or inside
a building between the ground and that building's roof. Cell-center
sampling keeps the rule unambiguous: a footprint narrower than one cell
that misses every center simply does not appear, which is the accepted
cost of an 8 m default cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from firetwin.errors import EmptyExtent
from firetwin.geo.buildings import BuildingSet
from firetwin.geo.terrain import Heightfield


@dataclass(frozen=True)
class OccupancyGrid:
    """Solid mask over a regular 3D grid in local-frame meters.

    solid is indexed [ix, iy, iz]; (x0, y0, z0) is the outer corner of
    cell (0, 0, 0), so cell centers sit at x0 + (ix + 0.5) * cell.
    """

    solid: np.ndarray
    cell: float
    x0: float
    y0: float
    z0: float
    ground: np.ndarray  # terrain height sampled at column centers, (nx, ny)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.solid.shape

    def cell_center(self, ix: int, iy: int, iz: int) -> tuple[float, float, float]:
        return (
            self.x0 + (ix + 0.5) * self.cell,
            self.y0 + (iy + 0.5) * self.cell,
            self.z0 + (iz + 0.5) * self.cell,
        )


def voxelize(
    terrain: Heightfield,
    buildings: BuildingSet,
    shape: tuple[int, int, int],
    cell: float,
    origin: tuple[float, float] = (0.0, 0.0),
    z0: float = 0.0,
) -> OccupancyGrid:
    """Build the occupancy grid for a (nx, ny, nz) box of cubic cells.

    origin is the (x, y) of the grid's low corner in frame meters. The
    grid is centered on the origin-relative box, not on the terrain
    extent; callers position it around the source.
    """
    nx, ny, nz = shape
    if nx <= 0 or ny <= 0 or nz <= 0 or cell <= 0:
        raise EmptyExtent(f"grid shape {shape} at cell {cell} has no volume")

    x0, y0 = origin
    xs = x0 + (np.arange(nx) + 0.5) * cell
    ys = y0 + (np.arange(ny) + 0.5) * cell
    zs = z0 + (np.arange(nz) + 0.5) * cell

    ground = np.empty((nx, ny), dtype=np.float64)
    for ix, x in enumerate(xs):
        for iy, y in enumerate(ys):
            ground[ix, iy] = terrain.elevation_at(float(x), float(y))

    solid = np.zeros((nx, ny, nz), dtype=bool)
    # below-terrain cells
    solid |= zs[None, None, :] < ground[:, :, None]

    # building columns; bbox pre-filter keeps this O(footprint area)
    for b in buildings.buildings:
        bx0, by0, bx1, by1 = b.bbox
        ix_lo = max(0, int(np.floor((bx0 - x0) / cell - 0.5)))
        ix_hi = min(nx, int(np.ceil((bx1 - x0) / cell + 0.5)))
        iy_lo = max(0, int(np.floor((by0 - y0) / cell - 0.5)))
        iy_hi = min(ny, int(np.ceil((by1 - y0) / cell + 0.5)))
        for ix in range(ix_lo, ix_hi):
            for iy in range(iy_lo, iy_hi):
                if not b.contains(float(xs[ix]), float(ys[iy])):
                    continue
                g = ground[ix, iy]
                col = (zs >= g) & (zs < g + b.height)
                solid[ix, iy, :] |= col

    return OccupancyGrid(solid=solid, cell=cell, x0=x0, y0=y0, z0=z0, ground=ground)
