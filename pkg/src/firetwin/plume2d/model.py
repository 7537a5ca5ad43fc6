"""Steady-state ground-source Gaussian plume concentrations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from firetwin.plume2d.sigma import sigma
from firetwin.weather.models import PasquillClass

# Wind floor: below this the 1/u form blows up, so speed is clamped and
# the result flagged as computed under calm conditions.
U_MIN = 0.5

DEFAULT_MIXING_HEIGHT_M = 1000.0

# PM2.5 band edges in µg/m³ used as default isopleth thresholds.
DEFAULT_THRESHOLDS = (12.0, 35.5, 55.5, 150.5)

# Fraction of the mixing height at which the vertical Gaussian is
# replaced by uniform mixing through the layer.
_MIXED_SIGMA_FRACTION = 0.8

# Area-source initial spread: a circle of radius r contributes roughly
# r / 2.15 of initial sigma-y (the 10% edge-concentration convention).
_RADIUS_TO_SIGMA = 1.0 / 2.15


@dataclass(frozen=True)
class PlumeParams:
    """Inputs to one steady-state plume evaluation.

    q is the PM2.5 emission rate in µg/s; u the floored wind speed in
    m/s; wind_toward a unit vector in local (east, north) meters;
    source the origin of the plume in the same frame. calm records that
    the raw speed was below U_MIN before flooring.
    """

    q: float
    u: float
    stability: PasquillClass
    source: tuple[float, float]
    wind_toward: tuple[float, float]
    mixing_height: float = DEFAULT_MIXING_HEIGHT_M
    source_radius: float = 0.0
    calm: bool = False

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError(f"emission rate {self.q} must be positive")
        if self.u < U_MIN:
            raise ValueError(f"wind speed {self.u} below floor {U_MIN}")
        if self.mixing_height <= 0:
            raise ValueError("mixing height must be positive")
        norm = math.hypot(*self.wind_toward)
        if not math.isclose(norm, 1.0, rel_tol=1e-6):
            raise ValueError(f"wind_toward must be a unit vector, |v| = {norm}")


def make_params(
    q: float,
    wind_speed: float,
    wind_toward: tuple[float, float],
    stability: PasquillClass,
    source: tuple[float, float] = (0.0, 0.0),
    mixing_height: float = DEFAULT_MIXING_HEIGHT_M,
    source_radius: float = 0.0,
) -> PlumeParams:
    """Floor the wind speed, normalize the direction, flag calm air.

    A calm wind vector (0, 0) is replaced by an arbitrary fixed heading
    since direction is meaningless below the floor.
    """
    calm = wind_speed < U_MIN
    norm = math.hypot(*wind_toward)
    toward = (wind_toward[0] / norm, wind_toward[1] / norm) if norm > 0 else (1.0, 0.0)
    return PlumeParams(
        q=q,
        u=max(wind_speed, U_MIN),
        stability=stability,
        source=source,
        wind_toward=toward,
        mixing_height=mixing_height,
        source_radius=source_radius,
        calm=calm,
    )


def effective_sigmas(params: PlumeParams, x):
    """Dispersion coefficients with the area-source initial spread folded in."""
    sy, sz = sigma(params.stability, x)
    if params.source_radius > 0:
        sy = np.hypot(sy, params.source_radius * _RADIUS_TO_SIGMA)
    return sy, sz


def concentration(params: PlumeParams, x, y, z=0.0):
    """PM2.5 concentration in µg/m³ at plume-frame (x downwind, y crosswind,
    z above ground) meters. Zero upwind (x <= 0) and above the mixing layer.

    Ground-source reflected Gaussian; once sigma-z reaches 0.8 of the
    mixing height the vertical profile switches to uniform mixing
    through the layer.
    """
    scalar_input = np.ndim(x) == 0 and np.ndim(y) == 0 and np.ndim(z) == 0
    xa, ya, za = np.broadcast_arrays(
        np.asarray(x, dtype=float), np.asarray(y, dtype=float), np.asarray(z, dtype=float)
    )
    shape = xa.shape
    xa = np.atleast_1d(xa)
    ya = np.atleast_1d(ya)
    za = np.atleast_1d(za)

    out = np.zeros(xa.shape, dtype=float)
    down = xa > 0.0
    if np.any(down):
        sy, sz = effective_sigmas(params, xa[down])
        yd = ya[down]
        zd = za[down]
        zi = params.mixing_height
        cross = np.exp(-(yd * yd) / (2.0 * sy * sy))

        gaussian = (
            params.q
            / (math.pi * params.u * sy * sz)
            * cross
            * np.exp(-(zd * zd) / (2.0 * sz * sz))
        )
        mixed = params.q / (math.sqrt(2.0 * math.pi) * params.u * sy * zi) * cross
        use_mixed = sz >= _MIXED_SIGMA_FRACTION * zi
        vals = np.where(use_mixed, np.where(zd <= zi, mixed, 0.0), gaussian)
        out[down] = vals

    if scalar_input:
        return float(out[0])
    return out.reshape(shape)


def centerline_extent(params: PlumeParams, threshold: float, x_max: float) -> float:
    """Downwind distance where the ground centerline falls below threshold.

    Returns x_max when the plume still exceeds the threshold there. The
    centerline is strictly decreasing so a bisection suffices.
    """
    if concentration(params, x_max, 0.0) >= threshold:
        return x_max
    lo, hi = 1e-3, x_max
    if concentration(params, lo, 0.0) < threshold:
        return lo
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if concentration(params, mid, 0.0) >= threshold:
            lo = mid
        else:
            hi = mid
    return hi
