"""Urban fire and smoke digital twin.

Ingests live fire incident feeds, fuses weather and city geometry, and
predicts smoke dispersion with a fast 2D Gaussian plume model and a 3D
voxel fluid solver, served over HTTP with KML/GeoJSON/OBJ artifacts.
"""

__version__ = "0.1.0"
