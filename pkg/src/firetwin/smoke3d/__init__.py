from firetwin.smoke3d.snapshot import (
    Snapshot,
    isosurface,
    read_raw_grid,
    snapshot,
    write_obj,
    write_raw_grid,
)
from firetwin.smoke3d.solver import project, run_to_horizons, step
from firetwin.smoke3d.state import SmokeState, SolverConfig, init_scene

__all__ = [
    "SmokeState",
    "Snapshot",
    "SolverConfig",
    "init_scene",
    "isosurface",
    "project",
    "read_raw_grid",
    "run_to_horizons",
    "snapshot",
    "step",
    "write_obj",
    "write_raw_grid",
]
