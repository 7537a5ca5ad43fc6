from firetwin.plume2d.emissions import (
    DEFAULT_PROFILE,
    EmissionProfile,
    EmissionSpec,
)
from firetwin.plume2d.export import export_geojson, export_kml
from firetwin.plume2d.footprint import PlumeFootprint, isopleths
from firetwin.plume2d.model import (
    DEFAULT_MIXING_HEIGHT_M,
    DEFAULT_THRESHOLDS,
    U_MIN,
    PlumeParams,
    concentration,
    make_params,
)
from firetwin.plume2d.sigma import sigma

__all__ = [
    "DEFAULT_MIXING_HEIGHT_M",
    "DEFAULT_PROFILE",
    "DEFAULT_THRESHOLDS",
    "EmissionProfile",
    "EmissionSpec",
    "PlumeFootprint",
    "PlumeParams",
    "U_MIN",
    "concentration",
    "export_geojson",
    "export_kml",
    "isopleths",
    "make_params",
    "sigma",
]
