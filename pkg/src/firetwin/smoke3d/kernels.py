"""Compiled grid kernels for the voxel smoke solver.

All fields are float64 arrays indexed [ix, iy, iz] on a staggered MAC
layout: density lives at cell centers, u at x faces (nx+1, ny, nz),
v at y faces (nx, ny+1, nz), w at z faces (nx, ny, nz+1).

Boundary flags: xm_closed/xp_closed/ym_closed/yp_closed mark lateral
domain sides that carry a fixed inflow (upwind side of the ambient
wind).  Closed sides get Neumann pressure; open sides and the top get
a zero Dirichlet ghost so the projection can push flow out.  The
ground face is always a wall.

Stencil sums are grouped per axis, e.g. (sx + sy) + sz, so mirroring
the scene across either horizontal axis mirrors the floating-point
result to round-off rather than reassociation noise.
"""

import numpy as np
from numba import njit


@njit(cache=True, fastmath=True, nogil=True, inline="always")
def _clamp(x, lo, hi):
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


@njit(cache=True, fastmath=True, nogil=True, inline="always")
def _sample_plain(f, x, y, z):
    # Trilinear sample of a face field in its own index space.
    nx, ny, nz = f.shape
    x = _clamp(x, 0.0, nx - 1.0)
    y = _clamp(y, 0.0, ny - 1.0)
    z = _clamp(z, 0.0, nz - 1.0)
    i0 = int(x)
    j0 = int(y)
    k0 = int(z)
    if i0 > nx - 2:
        i0 = nx - 2
    if j0 > ny - 2:
        j0 = ny - 2
    if k0 > nz - 2:
        k0 = nz - 2
    if i0 < 0:
        i0 = 0
    if j0 < 0:
        j0 = 0
    if k0 < 0:
        k0 = 0
    fx = x - i0
    fy = y - j0
    fz = z - k0
    i1 = i0 + 1
    j1 = j0 + 1
    k1 = k0 + 1
    lo = (f[i0, j0, k0] * (1.0 - fx) + f[i1, j0, k0] * fx) * (1.0 - fy) + (
        f[i0, j1, k0] * (1.0 - fx) + f[i1, j1, k0] * fx
    ) * fy
    hi = (f[i0, j0, k1] * (1.0 - fx) + f[i1, j0, k1] * fx) * (1.0 - fy) + (
        f[i0, j1, k1] * (1.0 - fx) + f[i1, j1, k1] * fx
    ) * fy
    return lo * (1.0 - fz) + hi * fz


@njit(cache=True, fastmath=True, nogil=True)
def advect_scalar(rho, u, v, w, solid, dth, out):
    """Conservative upwind finite-volume advection of density.

    dth is dt / cell.  Each face moves rho from its upwind cell, so the
    total over the domain changes only by boundary flux: the scheme is
    exactly conservative and, with the summed-CFL bound the solver
    enforces, keeps density non-negative.  Solid faces carry zero
    velocity and air entering through domain boundaries is smoke-free.
    """
    nx, ny, nz = rho.shape
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                if solid[i, j, k]:
                    out[i, j, k] = 0.0
                    continue
                c = rho[i, j, k]
                f = u[i, j, k]
                fxl = f * ((rho[i - 1, j, k] if i > 0 else 0.0) if f > 0.0 else c)
                f = u[i + 1, j, k]
                fxr = f * (c if f > 0.0 else (rho[i + 1, j, k] if i < nx - 1 else 0.0))
                f = v[i, j, k]
                fyl = f * ((rho[i, j - 1, k] if j > 0 else 0.0) if f > 0.0 else c)
                f = v[i, j + 1, k]
                fyr = f * (c if f > 0.0 else (rho[i, j + 1, k] if j < ny - 1 else 0.0))
                f = w[i, j, k]
                fzl = f * ((rho[i, j, k - 1] if k > 0 else 0.0) if f > 0.0 else c)
                f = w[i, j, k + 1]
                fzr = f * (c if f > 0.0 else (rho[i, j, k + 1] if k < nz - 1 else 0.0))
                out[i, j, k] = c - dth * (
                    ((fxr - fxl) + (fyr - fyl)) + (fzr - fzl)
                )


@njit(cache=True, fastmath=True, nogil=True)
def advect_u(u, v, w, dth, out):
    nx1, ny, nz = u.shape
    nx = nx1 - 1
    for i in range(nx1):
        for j in range(ny):
            for k in range(nz):
                il = i - 1
                if il < 0:
                    il = 0
                ir = i
                if ir > nx - 1:
                    ir = nx - 1
                uu = u[i, j, k]
                vv = 0.25 * (
                    (v[il, j, k] + v[il, j + 1, k])
                    + (v[ir, j, k] + v[ir, j + 1, k])
                )
                ww = 0.25 * (
                    (w[il, j, k] + w[il, j, k + 1])
                    + (w[ir, j, k] + w[ir, j, k + 1])
                )
                out[i, j, k] = _sample_plain(
                    u, i - dth * uu, j - dth * vv, k - dth * ww
                )


@njit(cache=True, fastmath=True, nogil=True)
def advect_v(u, v, w, dth, out):
    nx, ny1, nz = v.shape
    ny = ny1 - 1
    for i in range(nx):
        for j in range(ny1):
            for k in range(nz):
                jl = j - 1
                if jl < 0:
                    jl = 0
                jr = j
                if jr > ny - 1:
                    jr = ny - 1
                uu = 0.25 * (
                    (u[i, jl, k] + u[i + 1, jl, k])
                    + (u[i, jr, k] + u[i + 1, jr, k])
                )
                vv = v[i, j, k]
                ww = 0.25 * (
                    (w[i, jl, k] + w[i, jl, k + 1])
                    + (w[i, jr, k] + w[i, jr, k + 1])
                )
                out[i, j, k] = _sample_plain(
                    v, i - dth * uu, j - dth * vv, k - dth * ww
                )


@njit(cache=True, fastmath=True, nogil=True)
def advect_w(u, v, w, dth, out):
    nx, ny, nz1 = w.shape
    nz = nz1 - 1
    for i in range(nx):
        for j in range(ny):
            for k in range(nz1):
                kl = k - 1
                if kl < 0:
                    kl = 0
                kr = k
                if kr > nz - 1:
                    kr = nz - 1
                uu = 0.25 * (
                    (u[i, j, kl] + u[i + 1, j, kl])
                    + (u[i, j, kr] + u[i + 1, j, kr])
                )
                vv = 0.25 * (
                    (v[i, j, kl] + v[i, j + 1, kl])
                    + (v[i, j, kr] + v[i, j + 1, kr])
                )
                ww = w[i, j, k]
                out[i, j, k] = _sample_plain(
                    w, i - dth * uu, j - dth * vv, k - dth * ww
                )


@njit(cache=True, fastmath=True, nogil=True)
def add_buoyancy(w, rho, solid, coef, inv_ref):
    """w += coef * min(1, face density / reference) on interior z faces.

    The density fraction saturates at 1: past the reference loading the
    smoke is treated as fully buoyant, which keeps a concentrated point
    source from producing unbounded accelerations in its own cell.
    """
    nx, ny, nz = rho.shape
    for i in range(nx):
        for j in range(ny):
            for k in range(1, nz):
                if solid[i, j, k - 1] or solid[i, j, k]:
                    continue
                f = 0.5 * (rho[i, j, k - 1] + rho[i, j, k]) * inv_ref
                if f > 1.0:
                    f = 1.0
                w[i, j, k] += coef * f


@njit(cache=True, fastmath=True, nogil=True)
def diffuse_step(rho, solid, a, out):
    """One explicit diffusion substep, a = dt_sub * D / cell**2.

    Solid neighbours and domain walls are no-flux, so diffusion alone
    conserves mass exactly.
    """
    nx, ny, nz = rho.shape
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                if solid[i, j, k]:
                    out[i, j, k] = 0.0
                    continue
                c = rho[i, j, k]
                sx = 0.0
                nxn = 0
                if i > 0 and not solid[i - 1, j, k]:
                    sx += rho[i - 1, j, k]
                    nxn += 1
                if i < nx - 1 and not solid[i + 1, j, k]:
                    sx += rho[i + 1, j, k]
                    nxn += 1
                sy = 0.0
                nyn = 0
                if j > 0 and not solid[i, j - 1, k]:
                    sy += rho[i, j - 1, k]
                    nyn += 1
                if j < ny - 1 and not solid[i, j + 1, k]:
                    sy += rho[i, j + 1, k]
                    nyn += 1
                sz = 0.0
                nzn = 0
                if k > 0 and not solid[i, j, k - 1]:
                    sz += rho[i, j, k - 1]
                    nzn += 1
                if k < nz - 1 and not solid[i, j, k + 1]:
                    sz += rho[i, j, k + 1]
                    nzn += 1
                cnt = nxn + nyn + nzn
                out[i, j, k] = c + a * ((sx + sy) + sz - cnt * c)


@njit(cache=True, fastmath=True, nogil=True)
def divergence(u, v, w, solid, inv_h, out):
    nx, ny, nz = out.shape
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                if solid[i, j, k]:
                    out[i, j, k] = 0.0
                    continue
                du = u[i + 1, j, k] - u[i, j, k]
                dv = v[i, j + 1, k] - v[i, j, k]
                dw = w[i, j, k + 1] - w[i, j, k]
                out[i, j, k] = ((du + dv) + dw) * inv_h


@njit(cache=True, fastmath=True, nogil=True)
def relax_pass(p, rhs, solid, xm_closed, xp_closed, ym_closed, yp_closed, omega):
    """One red-black SOR pass of lap(p) = rhs / h**2, rhs pre-scaled by h**2.

    Walls and closed inflow sides are Neumann (dropped from the
    stencil); open lateral sides and the top see a zero ghost value.
    Each color touches only cells whose neighbours are the other
    color, so results do not depend on traversal order; mirroring a
    scene across an axis of odd extent preserves cell color and with
    it the floating-point symmetry of the solve.

    Returns the max absolute pressure change of the pass, a cheap
    convergence proxy the caller can use to schedule true residual
    checks.
    """
    nx, ny, nz = rhs.shape
    worst = 0.0
    for color in range(2):
        for i in range(nx):
            for j in range(ny):
                for k in range((i + j + color) & 1, nz, 2):
                    if solid[i, j, k]:
                        continue
                    sx = 0.0
                    cx = 0
                    if i > 0:
                        if not solid[i - 1, j, k]:
                            sx += p[i - 1, j, k]
                            cx += 1
                    elif not xm_closed:
                        cx += 1
                    if i < nx - 1:
                        if not solid[i + 1, j, k]:
                            sx += p[i + 1, j, k]
                            cx += 1
                    elif not xp_closed:
                        cx += 1
                    sy = 0.0
                    cy = 0
                    if j > 0:
                        if not solid[i, j - 1, k]:
                            sy += p[i, j - 1, k]
                            cy += 1
                    elif not ym_closed:
                        cy += 1
                    if j < ny - 1:
                        if not solid[i, j + 1, k]:
                            sy += p[i, j + 1, k]
                            cy += 1
                    elif not yp_closed:
                        cy += 1
                    sz = 0.0
                    cz = 0
                    if k > 0 and not solid[i, j, k - 1]:
                        sz += p[i, j, k - 1]
                        cz += 1
                    if k < nz - 1:
                        if not solid[i, j, k + 1]:
                            sz += p[i, j, k + 1]
                            cz += 1
                    else:
                        cz += 1
                    cnt = cx + cy + cz
                    if cnt > 0:
                        gs = ((sx + sy) + sz - rhs[i, j, k]) / cnt
                        d = omega * (gs - p[i, j, k])
                        p[i, j, k] += d
                        if d < 0.0:
                            d = -d
                        if d > worst:
                            worst = d
    return worst


@njit(cache=True, fastmath=True, nogil=True)
def poisson_residual_max(p, rhs, solid, xm_closed, xp_closed, ym_closed, yp_closed):
    """Max |lap(p)*h**2 - rhs| over open cells.

    Divided by h**2 this equals the cell divergence left after the
    gradient subtraction, so it is the projection stopping criterion.
    """
    nx, ny, nz = rhs.shape
    worst = 0.0
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                if solid[i, j, k]:
                    continue
                c = p[i, j, k]
                sx = 0.0
                cx = 0
                if i > 0:
                    if not solid[i - 1, j, k]:
                        sx += p[i - 1, j, k]
                        cx += 1
                elif not xm_closed:
                    cx += 1
                if i < nx - 1:
                    if not solid[i + 1, j, k]:
                        sx += p[i + 1, j, k]
                        cx += 1
                elif not xp_closed:
                    cx += 1
                sy = 0.0
                cy = 0
                if j > 0:
                    if not solid[i, j - 1, k]:
                        sy += p[i, j - 1, k]
                        cy += 1
                elif not ym_closed:
                    cy += 1
                if j < ny - 1:
                    if not solid[i, j + 1, k]:
                        sy += p[i, j + 1, k]
                        cy += 1
                elif not yp_closed:
                    cy += 1
                sz = 0.0
                cz = 0
                if k > 0 and not solid[i, j, k - 1]:
                    sz += p[i, j, k - 1]
                    cz += 1
                if k < nz - 1:
                    if not solid[i, j, k + 1]:
                        sz += p[i, j, k + 1]
                        cz += 1
                else:
                    cz += 1
                cnt = cx + cy + cz
                r = (sx + sy) + sz - cnt * c - rhs[i, j, k]
                if r < 0.0:
                    r = -r
                if r > worst:
                    worst = r
    return worst


@njit(cache=True, fastmath=True, nogil=True)
def subtract_gradient(u, v, w, p, solid, inv_h, xm_closed, xp_closed, ym_closed, yp_closed):
    nx, ny, nz = p.shape
    for j in range(ny):
        for k in range(nz):
            if not xm_closed and not solid[0, j, k]:
                u[0, j, k] -= p[0, j, k] * inv_h
            if not xp_closed and not solid[nx - 1, j, k]:
                u[nx, j, k] -= (0.0 - p[nx - 1, j, k]) * inv_h
    for i in range(1, nx):
        for j in range(ny):
            for k in range(nz):
                if solid[i - 1, j, k] or solid[i, j, k]:
                    continue
                u[i, j, k] -= (p[i, j, k] - p[i - 1, j, k]) * inv_h
    for i in range(nx):
        for k in range(nz):
            if not ym_closed and not solid[i, 0, k]:
                v[i, 0, k] -= p[i, 0, k] * inv_h
            if not yp_closed and not solid[i, ny - 1, k]:
                v[i, ny, k] -= (0.0 - p[i, ny - 1, k]) * inv_h
    for i in range(nx):
        for j in range(1, ny):
            for k in range(nz):
                if solid[i, j - 1, k] or solid[i, j, k]:
                    continue
                v[i, j, k] -= (p[i, j, k] - p[i, j - 1, k]) * inv_h
    for i in range(nx):
        for j in range(ny):
            if not solid[i, j, nz - 1]:
                w[i, j, nz] -= (0.0 - p[i, j, nz - 1]) * inv_h
    for i in range(nx):
        for j in range(ny):
            for k in range(1, nz):
                if solid[i, j, k - 1] or solid[i, j, k]:
                    continue
                w[i, j, k] -= (p[i, j, k] - p[i, j, k - 1]) * inv_h


@njit(cache=True, fastmath=True, nogil=True)
def zero_solid_faces(u, v, w, solid):
    nx, ny, nz = solid.shape
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                if solid[i, j, k]:
                    u[i, j, k] = 0.0
                    u[i + 1, j, k] = 0.0
                    v[i, j, k] = 0.0
                    v[i, j + 1, k] = 0.0
                    w[i, j, k] = 0.0
                    w[i, j, k + 1] = 0.0


@njit(cache=True, fastmath=True, nogil=True)
def apply_inflow(u, v, w, solid, vx, vy, xm_closed, xp_closed, ym_closed, yp_closed):
    """Pin fixed-inflow faces to the ambient wind and close the ground."""
    nx, ny, nz = solid.shape
    for j in range(ny):
        for k in range(nz):
            if xm_closed:
                u[0, j, k] = 0.0 if solid[0, j, k] else vx
            if xp_closed:
                u[nx, j, k] = 0.0 if solid[nx - 1, j, k] else vx
    for i in range(nx):
        for k in range(nz):
            if ym_closed:
                v[i, 0, k] = 0.0 if solid[i, 0, k] else vy
            if yp_closed:
                v[i, ny, k] = 0.0 if solid[i, ny - 1, k] else vy
    for i in range(nx):
        for j in range(ny):
            w[i, j, 0] = 0.0


@njit(cache=True, fastmath=True, nogil=True)
def boundary_outflux(rho, u, v, w, over_dt_h2):
    """Mass leaving through open faces during one substep, in source units.

    over_dt_h2 = dt * cell**2.  Upwinded: only outward-moving flux
    counts, carrying the boundary cell's density.
    """
    nx, ny, nz = rho.shape
    total = 0.0
    for j in range(ny):
        for k in range(nz):
            f = -u[0, j, k]
            if f > 0.0:
                total += f * rho[0, j, k]
            f = u[nx, j, k]
            if f > 0.0:
                total += f * rho[nx - 1, j, k]
    for i in range(nx):
        for k in range(nz):
            f = -v[i, 0, k]
            if f > 0.0:
                total += f * rho[i, 0, k]
            f = v[i, ny, k]
            if f > 0.0:
                total += f * rho[i, ny - 1, k]
    for i in range(nx):
        for j in range(ny):
            f = w[i, j, nz]
            if f > 0.0:
                total += f * rho[i, j, nz - 1]
    return total * over_dt_h2


@njit(cache=True, fastmath=True, nogil=True)
def clamp_nonnegative(rho):
    nx, ny, nz = rho.shape
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                if rho[i, j, k] < 0.0:
                    rho[i, j, k] = 0.0


@njit(cache=True, fastmath=True, nogil=True)
def cfl_speed_sum(u, v, w):
    """max|u| + max|v| + max|w|, the speed bound for the summed CFL.

    Upwind advection stays non-negative when the outgoing fluxes of a
    cell remove at most its own content, which the sum of per-axis
    maxima guarantees.
    """
    mu = 0.0
    for x in u.flat:
        if x > mu:
            mu = x
        elif -x > mu:
            mu = -x
    mv = 0.0
    for x in v.flat:
        if x > mv:
            mv = x
        elif -x > mv:
            mv = -x
    mw = 0.0
    for x in w.flat:
        if x > mw:
            mw = x
        elif -x > mw:
            mw = -x
    return (mu + mv) + mw


def field_max_delta(a, b):
    """Max absolute difference, used by the steady-flow detector."""
    return float(np.max(np.abs(a - b))) if a.size else 0.0
