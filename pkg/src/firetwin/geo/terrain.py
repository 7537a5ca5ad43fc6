"""ESRI ASCII grid terrain loading and bilinear elevation sampling."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from firetwin.errors import HeaderMismatch, NonNumericCell

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")


@dataclass(frozen=True)
class Heightfield:
    """Regular elevation grid in local metric coordinates.

    ``elevations`` is row-major with row 0 the northernmost row, as read
    from the file. Cells flagged nodata are NaN; ``nodata`` keeps the
    sentinel the file declared.
    """

    ncols: int
    nrows: int
    cellsize: float
    xll: float
    yll: float
    elevations: np.ndarray = field(repr=False)
    nodata: float

    @property
    def extent(self) -> tuple[float, float, float, float]:
        """(x0, y0, x1, y1) bounding box in local meters."""
        return (
            self.xll,
            self.yll,
            self.xll + self.ncols * self.cellsize,
            self.yll + self.nrows * self.cellsize,
        )

    def elevation_at(self, x, y):
        """Bilinear elevation at local (x, y), arrays or scalars.

        Samples between cell centers, clamped at the grid edge. Nodata
        cells contribute elevation 0 (documented approximation: gaps in
        the source DEM are treated as datum level).
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        # column/row in cell-center coordinates
        cx = (x - self.xll) / self.cellsize - 0.5
        cy = (y - self.yll) / self.cellsize - 0.5
        cx = np.clip(cx, 0.0, self.ncols - 1.0)
        cy = np.clip(cy, 0.0, self.nrows - 1.0)
        c0 = np.floor(cx).astype(int)
        r0f = np.floor(cy).astype(int)
        c1 = np.minimum(c0 + 1, self.ncols - 1)
        r1f = np.minimum(r0f + 1, self.nrows - 1)
        fx = cx - c0
        fy = cy - r0f
        # row 0 of the array is the top (north), so flip the row index
        grid = np.nan_to_num(self.elevations, nan=0.0)
        r0 = self.nrows - 1 - r0f
        r1 = self.nrows - 1 - r1f
        z00 = grid[r0, c0]
        z10 = grid[r0, c1]
        z01 = grid[r1, c0]
        z11 = grid[r1, c1]
        z = (
            z00 * (1 - fx) * (1 - fy)
            + z10 * fx * (1 - fy)
            + z01 * (1 - fx) * fy
            + z11 * fx * fy
        )
        return float(z) if z.ndim == 0 else z


def load_terrain(source: str | Path) -> Heightfield:
    """Parse an ESRI ASCII grid (.asc) document or file path."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        text = Path(source).read_text()
    else:
        text = source
    tokens_by_line = [ln.split() for ln in text.splitlines() if ln.strip()]

    header: dict[str, float] = {}
    body_start = 0
    for i, parts in enumerate(tokens_by_line):
        key = parts[0].lower()
        if key in _HEADER_KEYS and len(parts) == 2:
            try:
                header[key] = float(parts[1])
            except ValueError as exc:
                raise HeaderMismatch(f"non-numeric header value for {parts[0]}") from exc
            body_start = i + 1
        else:
            break

    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise HeaderMismatch(f"missing header keys: {', '.join(missing)}")

    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    if ncols <= 0 or nrows <= 0 or header["cellsize"] <= 0:
        raise HeaderMismatch("ncols, nrows and cellsize must be positive")

    values: list[float] = []
    for parts in tokens_by_line[body_start:]:
        for tok in parts:
            try:
                values.append(float(tok))
            except ValueError as exc:
                raise NonNumericCell(f"bad grid token {tok!r}") from exc
    if len(values) != ncols * nrows:
        raise HeaderMismatch(
            f"expected {ncols * nrows} cells, found {len(values)}"
        )

    nodata = header["nodata_value"]
    grid = np.array(values, dtype=float).reshape(nrows, ncols)
    grid[grid == nodata] = np.nan
    return Heightfield(
        ncols=ncols,
        nrows=nrows,
        cellsize=header["cellsize"],
        xll=header["xllcorner"],
        yll=header["yllcorner"],
        elevations=grid,
        nodata=nodata,
    )
