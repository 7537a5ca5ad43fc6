"""Time integration for the voxel smoke solver.

Stable-fluids scheme per step: source injection, buoyancy, semi-
Lagrangian advection of momentum and density, optional explicit
diffusion, then pressure projection to make the flow divergence-free
around terrain and buildings.
"""

import math
from dataclasses import dataclass

import numpy as np

from firetwin.errors import CFLViolation
from firetwin.smoke3d import kernels
from firetwin.smoke3d.state import SmokeState, SolverConfig, boundary_flags

_PASSES_PER_CHECK = 4
_SOR_OMEGA = 1.7
_DIFFUSION_STABLE_FRACTION = 1.0 / 6.0
_STEADY_CHECK_EVERY = 10
_STEADY_CONSECUTIVE = 2


@dataclass(frozen=True)
class ProjectionReport:
    iterations: int
    max_divergence: float
    converged: bool


@dataclass(frozen=True)
class HorizonResult:
    """Density snapshot at one forecast horizon."""

    hour: int
    sim_time: float
    density: np.ndarray
    domain_mass: float
    injected_mass: float
    outflux_mass: float
    steady_state: bool


def _scratch(state: SmokeState) -> dict:
    cache = state.__dict__.get("_scratch_arrays")
    if cache is None:
        nx, ny, nz = state.shape
        cache = {
            "rho": np.empty((nx, ny, nz), dtype=np.float64),
            "u": np.empty((nx + 1, ny, nz), dtype=np.float64),
            "v": np.empty((nx, ny + 1, nz), dtype=np.float64),
            "w": np.empty((nx, ny, nz + 1), dtype=np.float64),
            "div": np.empty((nx, ny, nz), dtype=np.float64),
        }
        state.__dict__["_scratch_arrays"] = cache
    return cache


def project(state: SmokeState, config: SolverConfig) -> ProjectionReport:
    """Make the velocity field divergence-free in open cells.

    Red-black SOR with Neumann pressure on solids, the ground, and
    fixed-inflow sides, and a zero ghost on open lateral sides and the
    top.  The pressure field is kept on the state as a warm start for
    the next call.  Non-convergence is reported, not raised: the best
    iterate is applied and the state metadata is flagged so downstream
    snapshots carry the caveat.
    """
    grid = state.grid
    solid = grid.solid
    h = grid.cell
    flags = boundary_flags(config.wind_inflow)
    scratch = _scratch(state)
    div = scratch["div"]
    kernels.divergence(state.u, state.v, state.w, solid, 1.0 / h, div)
    max_div = float(np.max(np.abs(div)))
    if max_div <= config.projection_tol:
        return ProjectionReport(0, max_div, True)

    rhs = div
    rhs *= h * h
    if state.pressure is None:
        state.pressure = np.zeros_like(state.density)
    p = state.pressure
    inv_h2 = 1.0 / (h * h)
    iters = 0
    residual = math.inf
    since_check = 0
    while iters < config.projection_max_iters:
        delta = kernels.relax_pass(p, rhs, solid, *flags, _SOR_OMEGA)
        iters += 1
        since_check += 1
        # The pass's own max pressure change is a free convergence
        # proxy; the decision is still made on the true residual.
        if delta * 6.0 * inv_h2 > config.projection_tol and since_check < _PASSES_PER_CHECK * 4:
            continue
        since_check = 0
        residual = kernels.poisson_residual_max(p, rhs, solid, *flags) * inv_h2
        if residual <= config.projection_tol:
            break
    converged = residual <= config.projection_tol
    kernels.subtract_gradient(state.u, state.v, state.w, p, solid, 1.0 / h, *flags)
    if not converged:
        state.metadata["projection_converged"] = False
    return ProjectionReport(iters, float(residual), converged)


def _enforce_velocity_bcs(state: SmokeState, config: SolverConfig) -> None:
    flags = boundary_flags(config.wind_inflow)
    vx, vy = config.wind_inflow
    kernels.zero_solid_faces(state.u, state.v, state.w, state.grid.solid)
    kernels.apply_inflow(state.u, state.v, state.w, state.grid.solid, vx, vy, *flags)


def _diffuse(state: SmokeState, config: SolverConfig, dt: float) -> None:
    h = state.grid.cell
    alpha = dt * config.diffusion / (h * h)
    if alpha <= 0.0:
        return
    nsub = max(1, math.ceil(alpha / _DIFFUSION_STABLE_FRACTION))
    a = alpha / nsub
    scratch = _scratch(state)
    out = scratch["rho"]
    for _ in range(nsub):
        kernels.diffuse_step(state.density, state.grid.solid, a, out)
        state.density, scratch["rho"] = out, state.density
        out = scratch["rho"]


def _check_velocity_steady(state: SmokeState, config: SolverConfig) -> None:
    # Subsampled max |du| between consecutive velocity updates; two
    # quiet intervals in a row freeze the flow field for the rest of
    # the run (quasi-steady plume assumption).
    scratch = _scratch(state)
    sample = state.u[::2, ::2, ::2]
    prev = scratch.get("u_prev")
    if prev is not None:
        delta = float(np.max(np.abs(sample - prev)))
        if delta < config.steady_velocity_tol:
            hits = state.metadata.get("velocity_steady_hits", 0) + 1
            state.metadata["velocity_steady_hits"] = hits
            if hits >= _STEADY_CONSECUTIVE:
                state.metadata["velocity_frozen"] = True
        else:
            state.metadata["velocity_steady_hits"] = 0
    scratch["u_prev"] = sample.copy()


def _substep(state: SmokeState, config: SolverConfig, dt: float) -> None:
    grid = state.grid
    solid = grid.solid
    h = grid.cell
    scratch = _scratch(state)
    frozen = state.metadata.get("velocity_frozen", False)
    # A dedicated counter, not step_count: CFL substepping advances
    # step_count by more than one, which can alias against an even
    # velocity_every and starve the velocity update entirely.
    vcount = scratch.get("velocity_counter", 0)
    scratch["velocity_counter"] = vcount + 1
    update_velocity = not frozen and vcount % config.velocity_every == 0

    injected = dt * state.source_rate
    state.density[state.source_index] += injected / h**3
    state.metadata["injected_mass"] += injected

    if update_velocity:
        # Velocity is advanced once per velocity_every density substeps,
        # so forces and momentum transport integrate over that interval.
        dt_v = dt * config.velocity_every
        if config.buoyancy_alpha != 0.0:
            coef = dt_v * config.buoyancy_alpha * state.source_buoyancy
            kernels.add_buoyancy(
                state.w, state.density, solid, coef, 1.0 / config.buoyancy_ref
            )
        dth = dt_v / h
        kernels.advect_u(state.u, state.v, state.w, dth, scratch["u"])
        kernels.advect_v(state.u, state.v, state.w, dth, scratch["v"])
        kernels.advect_w(state.u, state.v, state.w, dth, scratch["w"])
        state.u, scratch["u"] = scratch["u"], state.u
        state.v, scratch["v"] = scratch["v"], state.v
        state.w, scratch["w"] = scratch["w"], state.w
        _enforce_velocity_bcs(state, config)

    state.metadata["outflux_mass"] += kernels.boundary_outflux(
        state.density, state.u, state.v, state.w, dt * h * h
    )
    kernels.advect_scalar(state.density, state.u, state.v, state.w, solid, dt / h, scratch["rho"])
    state.density, scratch["rho"] = scratch["rho"], state.density
    kernels.clamp_nonnegative(state.density)

    if config.diffusion > 0.0:
        _diffuse(state, config, dt)

    if update_velocity:
        project(state, config)
        _enforce_velocity_bcs(state, config)
        if config.steady_skip:
            _check_velocity_steady(state, config)

    state.sim_time += dt
    state.step_count += 1


def step(state: SmokeState, config: SolverConfig) -> SmokeState:
    """Advance the state by config.dt, substepping to keep CFL bounded.

    Raises CFLViolation when even max_substeps equal splits cannot
    bring the per-substep CFL number under cfl_max.
    """
    h = state.grid.cell
    if state.metadata.get("velocity_frozen", False):
        # Frozen flow: the CFL bound cannot change between steps.
        vsum = state.__dict__.get("_frozen_vsum")
        if vsum is None:
            vsum = kernels.cfl_speed_sum(state.u, state.v, state.w)
            state.__dict__["_frozen_vsum"] = vsum
    else:
        vsum = kernels.cfl_speed_sum(state.u, state.v, state.w)
    cfl = vsum * config.dt / (h * config.cfl_max)
    nsub = max(1, math.ceil(cfl - 1e-12))
    if nsub > config.max_substeps:
        raise CFLViolation(
            f"summed CFL {vsum * config.dt / h:.2f} needs {nsub} substeps "
            f"(max {config.max_substeps}); reduce dt or wind"
        )
    dt = config.dt / nsub
    for _ in range(nsub):
        _substep(state, config, dt)
    if nsub > state.metadata.get("cfl_substeps_max", 1):
        state.metadata["cfl_substeps_max"] = nsub
    return state


def run_to_horizons(state: SmokeState, config: SolverConfig) -> list[HorizonResult]:
    """Advance to every configured snapshot hour and capture the field.

    Each snapshot lands within half a step of its nominal hour.  With
    steady_skip enabled, the run watches the density field; once it
    stops changing between checks the plume is declared steady, the
    velocity is frozen, and remaining horizons reuse the settled field
    with the mass ledger extrapolated at the injection rate (in steady
    state outflux balances injection).
    """
    marks = sorted(set(int(hh) for hh in config.snapshot_hours))
    results: list[HorizonResult] = []
    cell_volume = state.grid.cell**3
    rho_ref: np.ndarray | None = None
    steady_hits = 0
    steady = False
    calls = 0

    def capture(hour: int) -> None:
        results.append(
            HorizonResult(
                hour=hour,
                sim_time=state.sim_time,
                density=state.density.copy(),
                domain_mass=state.total_mass(),
                injected_mass=state.metadata["injected_mass"],
                outflux_mass=state.metadata["outflux_mass"],
                steady_state=steady,
            )
        )

    for hour in marks:
        target = hour * 3600.0
        if steady and config.steady_skip:
            extra = target - state.sim_time
            if extra > 0:
                added = extra * state.source_rate
                state.metadata["injected_mass"] += added
                state.metadata["outflux_mass"] += added
                state.sim_time = target
            capture(hour)
            continue
        while state.sim_time < target - config.dt / 2:
            step(state, config)
            calls += 1
            # Count step() calls, not substeps: substepping advances
            # step_count unevenly and can skip every multiple of the
            # check interval.
            if config.steady_skip and calls % _STEADY_CHECK_EVERY == 0:
                sample = state.density[::2, ::2, ::2]
                if rho_ref is not None:
                    num = float(np.sum(np.abs(sample - rho_ref)))
                    den = float(np.sum(rho_ref)) * cell_volume
                    rel = num * cell_volume / den if den > 0 else 1.0
                    if rel < config.steady_density_rel_tol:
                        steady_hits += 1
                    else:
                        steady_hits = 0
                    if steady_hits >= _STEADY_CONSECUTIVE:
                        steady = True
                        state.metadata["steady_state_reached"] = True
                        state.metadata["velocity_frozen"] = True
                rho_ref = sample.copy()
                if steady:
                    break
        if steady and config.steady_skip and state.sim_time < target - config.dt / 2:
            extra = target - state.sim_time
            added = extra * state.source_rate
            state.metadata["injected_mass"] += added
            state.metadata["outflux_mass"] += added
            state.sim_time = target
        capture(hour)
    return results
