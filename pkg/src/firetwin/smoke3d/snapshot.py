"""Snapshot serialization: raw density grids and isosurface meshes.

Raw grid format (little-endian, 52-byte header then payload):

    bytes 0..3    magic b"FTG1"
    uint32        format version, currently 1
    uint32 x3     nx, ny, nz
    float64       cell size in meters
    float64 x2    anchor longitude, latitude (grid corner x0, y0)
    float64       anchor elevation in meters (grid z0)
    float32[...]  density in ug/m^3, x index varies fastest, then y,
                  then z

The mesh is a triangle isosurface from marching cubes with vertices in
local frame meters; the sidecar metadata carries the lon/lat anchor so
clients can place it on a map.
"""

import struct
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np
from skimage import measure

from firetwin.geo import LocalFrame, unproject_enu
from firetwin.geo.voxel import OccupancyGrid
from firetwin.smoke3d.state import SmokeState

RAW_GRID_MAGIC = b"FTG1"
RAW_GRID_VERSION = 1
_HEADER = struct.Struct("<4sIIIIdddd")
_SCHEDULE_SLACK_S = 5.0


@dataclass(frozen=True)
class RawGrid:
    density: np.ndarray
    cell: float
    anchor_lon: float
    anchor_lat: float
    anchor_elevation: float


@dataclass(frozen=True)
class Snapshot:
    hour: int
    threshold: float
    raw_grid: bytes
    vertices: np.ndarray
    faces: np.ndarray
    metadata: dict

    def obj_text(self) -> str:
        return write_obj(self.vertices, self.faces)


def write_raw_grid(
    density: np.ndarray, grid: OccupancyGrid, frame: LocalFrame
) -> bytes:
    nx, ny, nz = density.shape
    anchor_lat, anchor_lon = unproject_enu(grid.x0, grid.y0, frame)
    header = _HEADER.pack(
        RAW_GRID_MAGIC,
        RAW_GRID_VERSION,
        nx,
        ny,
        nz,
        float(grid.cell),
        float(anchor_lon),
        float(anchor_lat),
        float(grid.z0),
    )
    payload = np.ascontiguousarray(
        density.transpose(2, 1, 0), dtype="<f4"
    ).tobytes()
    return header + payload


def read_raw_grid(data: bytes) -> RawGrid:
    magic, version, nx, ny, nz, cell, lon, lat, elev = _HEADER.unpack_from(data, 0)
    if magic != RAW_GRID_MAGIC:
        raise ValueError("not a raw smoke grid (bad magic)")
    if version != RAW_GRID_VERSION:
        raise ValueError(f"unsupported raw grid version {version}")
    flat = np.frombuffer(data, dtype="<f4", offset=_HEADER.size)
    if flat.size != nx * ny * nz:
        raise ValueError("raw grid payload size does not match header dims")
    density = flat.reshape(nz, ny, nx).transpose(2, 1, 0)
    return RawGrid(density, cell, lon, lat, elev)


def isosurface(
    density: np.ndarray, grid: OccupancyGrid, threshold: float
) -> tuple[np.ndarray, np.ndarray]:
    """Closed triangle mesh of the region above threshold.

    Vertices are in local frame meters. The volume is zero-padded one
    cell on every side so surfaces touching the domain boundary still
    close. Returns empty arrays when nothing exceeds the threshold.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if float(density.max(initial=0.0)) <= threshold:
        return np.zeros((0, 3), dtype=np.float64), np.zeros((0, 3), dtype=np.int64)
    padded = np.pad(density.astype(np.float64, copy=False), 1)
    cell = grid.cell
    verts, faces, _normals, _values = measure.marching_cubes(
        padded, level=threshold, spacing=(cell, cell, cell), method="lorensen"
    )
    # Padded index p samples the center of original cell p-1, which sits
    # at origin + (p - 0.5) * cell in world coordinates.
    verts = verts - 0.5 * cell
    verts[:, 0] += grid.x0
    verts[:, 1] += grid.y0
    verts[:, 2] += grid.z0
    return verts.astype(np.float64), faces.astype(np.int64)


def write_obj(vertices: np.ndarray, faces: np.ndarray) -> str:
    lines = ["# smoke isosurface, coordinates in local meters (x east, y north, z up)"]
    for x, y, z in vertices:
        lines.append(f"v {x:.4f} {y:.4f} {z:.4f}")
    for a, b, c in faces:
        lines.append(f"f {a + 1} {b + 1} {c + 1}")
    lines.append("")
    return "\n".join(lines)


def snapshot(
    state: SmokeState,
    hour: int,
    iso_threshold: float,
    frame: LocalFrame,
    density: np.ndarray | None = None,
    sim_time: float | None = None,
    generated_at: datetime | None = None,
) -> Snapshot:
    """Serialize one forecast horizon as a raw grid plus isosurface.

    density/sim_time default to the live state; pass a stored horizon
    field to snapshot an earlier hour after the run has moved on. The
    state must have reached the requested hour (within the scheduling
    slack of half a step).
    """
    rho = state.density if density is None else density
    t = state.sim_time if sim_time is None else sim_time
    if t + _SCHEDULE_SLACK_S < hour * 3600.0:
        raise ValueError(
            f"state at t={t:.1f}s has not reached the {hour}h horizon"
        )
    grid = state.grid
    anchor_lat, anchor_lon = unproject_enu(grid.x0, grid.y0, frame)
    stamp = generated_at or datetime.now(timezone.utc)
    verts, faces = isosurface(rho, grid, iso_threshold)
    nx, ny, nz = rho.shape
    meta = {
        "horizon_hours": int(hour),
        "threshold_ugm3": float(iso_threshold),
        "sim_time_s": float(t),
        "generated_at": stamp.isoformat(),
        "cell_m": float(grid.cell),
        "dims": [int(nx), int(ny), int(nz)],
        "anchor": {
            "lon": float(anchor_lon),
            "lat": float(anchor_lat),
            "elevation_m": float(grid.z0),
        },
        "source_snapped": bool(state.metadata.get("source_snapped", False)),
        "projection_converged": bool(state.metadata.get("projection_converged", True)),
        "steady_state": bool(state.metadata.get("steady_state_reached", False)),
        "injected_mass_ug": float(state.metadata.get("injected_mass", 0.0)),
        "outflux_mass_ug": float(state.metadata.get("outflux_mass", 0.0)),
        "domain_mass_ug": float(np.sum(rho)) * grid.cell**3,
        "vertex_count": int(verts.shape[0]),
        "face_count": int(faces.shape[0]),
    }
    raw = write_raw_grid(rho, grid, frame)
    return Snapshot(
        hour=int(hour),
        threshold=float(iso_threshold),
        raw_grid=raw,
        vertices=verts,
        faces=faces,
        metadata=meta,
    )
