"""Dispersion coefficient curves by stability class.

Briggs (1973) open-country interpolation formulas, as tabulated in
Hanna, Briggs & Hosker, "Handbook on Atmospheric Diffusion" (1982),
table 4.1. Chosen over the Martin (1976) power-law fit because these
stay positive and strictly increasing all the way to x -> 0, where the
power-law sigma-z intercepts go negative for the stable classes.
"""

from __future__ import annotations

import numpy as np

from firetwin.errors import NonPositiveDownwind
from firetwin.weather.models import PasquillClass

# sigma_y = a * x / sqrt(1 + 0.0001 x), x in meters
_SIGMA_Y_A = {
    PasquillClass.A: 0.22,
    PasquillClass.B: 0.16,
    PasquillClass.C: 0.11,
    PasquillClass.D: 0.08,
    PasquillClass.E: 0.06,
    PasquillClass.F: 0.04,
}


def _sigma_z(cls: PasquillClass, x):
    if cls is PasquillClass.A:
        return 0.20 * x
    if cls is PasquillClass.B:
        return 0.12 * x
    if cls is PasquillClass.C:
        return 0.08 * x / np.sqrt(1.0 + 0.0002 * x)
    if cls is PasquillClass.D:
        return 0.06 * x / np.sqrt(1.0 + 0.0015 * x)
    if cls is PasquillClass.E:
        return 0.03 * x / (1.0 + 0.0003 * x)
    return 0.016 * x / (1.0 + 0.0003 * x)


def sigma(stability: PasquillClass, x):
    """(sigma_y, sigma_z) in meters at downwind distance x > 0 meters.

    Accepts scalar or array x; raises NonPositiveDownwind if any x <= 0.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0.0):
        raise NonPositiveDownwind("sigma is defined for downwind x > 0 only")
    sy = _SIGMA_Y_A[stability] * xa / np.sqrt(1.0 + 0.0001 * xa)
    sz = _sigma_z(stability, xa)
    if np.ndim(x) == 0:
        return float(sy), float(sz)
    return sy, sz
