"""Geometry core: exact-tolerance primitives shared by every engine."""

from .base import TAU_AXIS, TAU_GEO, TAU_UNIT, snap, snap_key, unit, vec
from .plane import HalfSpace3, Plane3, plane_plane_line, side_containing
from .polygon import (Polygon2, chebyshev_radius, convex_hull_2d, merge_regions,
                      point_in_ring, ring_area, ring_is_convex, ring_is_simple)
from .polyhedron import (Face3, Polyhedron, Scene, is_convex, is_orthogonal,
                         make_box, newell_normal, orient_faces)
from .halfspace import intersect_halfspaces, redundant_sources
from .canonical import (canonical_scene, canonicalize, max_vertex_distance,
                        polyhedra_equal, polyhedron_key, scene_diff, scene_key,
                        scenes_equal)
from .arrangement import Arrangement2, Line2, build_arrangement, inscribed_radius

__all__ = [
    "TAU_AXIS", "TAU_GEO", "TAU_UNIT", "snap", "snap_key", "unit", "vec",
    "HalfSpace3", "Plane3", "plane_plane_line", "side_containing",
    "Polygon2", "chebyshev_radius", "convex_hull_2d", "merge_regions",
    "point_in_ring", "ring_area", "ring_is_convex", "ring_is_simple",
    "Face3", "Polyhedron", "Scene", "is_convex", "is_orthogonal",
    "make_box", "newell_normal", "orient_faces",
    "intersect_halfspaces", "redundant_sources",
    "canonical_scene", "canonicalize", "max_vertex_distance", "polyhedra_equal",
    "polyhedron_key", "scene_diff", "scene_key", "scenes_equal",
    "Arrangement2", "Line2", "build_arrangement", "inscribed_radius",
]
