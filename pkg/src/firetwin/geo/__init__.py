from firetwin.geo.frame import LocalFrame, project_enu, unproject_enu
from firetwin.geo.terrain import Heightfield, load_terrain
from firetwin.geo.polygons import point_in_polygon, ring_area
from firetwin.geo.buildings import Building, BuildingSet, load_buildings, load_feature_polygons
from firetwin.geo.voxel import OccupancyGrid, voxelize

__all__ = [
    "LocalFrame",
    "project_enu",
    "unproject_enu",
    "Heightfield",
    "load_terrain",
    "point_in_polygon",
    "ring_area",
    "Building",
    "BuildingSet",
    "load_buildings",
    "load_feature_polygons",
    "OccupancyGrid",
    "voxelize",
]
