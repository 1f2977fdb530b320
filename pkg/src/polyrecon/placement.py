"""Markup placement strategies: per-face markers, dense grids, vertex markup.

Placement is the forward direction of every round-trip test: it turns a scene
into a markup description, stamping whatever metadata the matching engine
needs (ids, elaboration references, orderings) from the face tags left by the
scene construction.
"""

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateScene, EmptyFace
from .geom import (Line2, Plane3, TAU_GEO, build_arrangement, inscribed_radius,
                   point_in_ring)
from .geom.polygon import ring_area
from .markers import Marker, MarkerMeta, MarkupDescription


@dataclass
class PlacementPolicy:
    mode: str = "centroid"          # "centroid" | "random-interior"
    markers_per_face: int = 1
    seed: int = 0
    emit_polyhedron_ids: bool = False
    emit_face_ids: bool = False
    emit_elaboration: bool = False  # elaboration_id + base_face_ref from face tags

    def __post_init__(self):
        if self.markers_per_face < 1:
            raise ValueError("markers_per_face must be >= 1")
        if self.mode not in ("centroid", "random-interior"):
            raise ValueError(f"unknown placement mode {self.mode!r}")


def _face_diameter(face):
    xmin, ymin, xmax, ymax = face.polygon.bbox()
    return math.hypot(xmax - xmin, ymax - ymin)


def _interior_margin(face, tau):
    return max(tau, 1e-3 * _face_diameter(face))


def _clearly_interior(face, pt2, margin):
    if face.polygon.contains(pt2, tau=margin) != 1:
        return False
    return True


def vertex_centroid(face):
    return face.polygon.outer.mean(axis=0)


def random_interior_point(face, rng, tau=None):
    """Rejection-sample a point strictly inside the face, off every ring."""
    t = TAU_GEO if tau is None else tau
    margin = _interior_margin(face, t)
    xmin, ymin, xmax, ymax = face.polygon.bbox()
    if xmax - xmin <= 2 * margin or ymax - ymin <= 2 * margin:
        raise EmptyFace("face too thin to hold an interior marker")
    for _ in range(10000):
        p = np.array([rng.uniform(xmin + margin, xmax - margin),
                      rng.uniform(ymin + margin, ymax - margin)])
        if _clearly_interior(face, p, margin):
            return p
    raise EmptyFace("rejection sampling found no interior point")


def face_anchor_points(face, policy, rng, tau=None):
    """markers_per_face points on the face per the policy mode."""
    t = TAU_GEO if tau is None else tau
    pts = []
    if policy.mode == "centroid":
        c = vertex_centroid(face)
        if _clearly_interior(face, c, _interior_margin(face, t)):
            pts.append(c)
        else:
            # vertex centroid of a nonconvex ring may fall outside; fall back
            pts.append(random_interior_point(face, rng, t))
    while len(pts) < policy.markers_per_face:
        pts.append(random_interior_point(face, rng, t))
    return pts


def _meta_for_face(face, policy):
    tag = face.tag
    kw = {}
    if policy.emit_polyhedron_ids and tag.get("polyhedron_id") is not None:
        kw["polyhedron_id"] = tag["polyhedron_id"]
    if policy.emit_face_ids and tag.get("face_id") is not None:
        kw["face_id"] = tag["face_id"]
    if policy.emit_elaboration:
        if tag.get("elaboration_id") is not None:
            kw["elaboration_id"] = tag["elaboration_id"]
        if tag.get("base_face_ref") is not None:
            kw["base_face_ref"] = tuple(tag["base_face_ref"])
        if tag.get("order_index") is not None:
            kw["order_index"] = tag["order_index"]
    return MarkerMeta(**kw)


def place_per_face(scene, policy=None, data_kind="point-plane", tau=None):
    """At least one marker on each face of every polyhedron.

    data_kind selects point-plane or point-normal markers; the emitted plane
    is the face's oriented plane and the normal points outward.
    """
    t = TAU_GEO if tau is None else tau
    policy = policy or PlacementPolicy()
    rng = random.Random(policy.seed)
    markers = []
    fresh_fid = 0
    for pi, poly in enumerate(scene.polyhedra):
        for face in poly.faces:
            meta = _meta_for_face(face, policy)
            if policy.emit_polyhedron_ids and meta.polyhedron_id is None:
                meta = meta.merged(polyhedron_id=pi + 1)
            if policy.emit_face_ids and meta.face_id is None:
                meta = meta.merged(face_id=fresh_fid)
            fresh_fid += 1
            for p2 in face_anchor_points(face, policy, rng, t):
                pos = face.to_world(p2)
                if data_kind == "point-plane":
                    markers.append(Marker(pos, plane=face.plane, meta=meta))
                elif data_kind == "point-normal":
                    markers.append(Marker(pos, normal=face.normal(), meta=meta))
                elif data_kind == "point":
                    markers.append(Marker(pos, meta=meta))
                else:
                    raise ValueError(f"unknown data kind {data_kind!r}")
    return MarkupDescription.from_list(markers)


def place_dense(scene, spacing, tau=None):
    """Point-plane markers on a grid so every face point is within `spacing`.

    Uses a square grid at pitch spacing/sqrt(2) plus boundary samples, which
    together guarantee the covering radius.
    """
    t = TAU_GEO if tau is None else tau
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    pitch = spacing / math.sqrt(2.0)
    markers = []
    for pi, poly in enumerate(scene.polyhedra):
        for face in poly.faces:
            meta = MarkerMeta(polyhedron_id=pi + 1)
            xmin, ymin, xmax, ymax = face.polygon.bbox()
            nx = max(1, int(math.ceil((xmax - xmin) / pitch)))
            ny = max(1, int(math.ceil((ymax - ymin) / pitch)))
            pts = []
            for i in range(nx + 1):
                for j in range(ny + 1):
                    p = np.array([xmin + (xmax - xmin) * i / nx,
                                  ymin + (ymax - ymin) * j / ny])
                    if face.polygon.contains(p, tau=t) >= 0:
                        pts.append(p)
            inset = min(1e-6, pitch * 1e-3)
            for ring in face.polygon.rings():
                n = len(ring)
                for i in range(n):
                    a, b = ring[i], ring[(i + 1) % n]
                    e = b - a
                    ln = float(np.linalg.norm(e))
                    if ln <= 0:
                        continue
                    inward = np.array([-e[1], e[0]]) / ln  # left of travel
                    steps = max(2, int(math.ceil(2.0 * ln / pitch)))
                    for s in range(1, steps):
                        pts.append(a + e * (s / steps) + inward * inset)
            for p2 in pts:
                markers.append(Marker(face.to_world(p2), plane=face.plane, meta=meta))
    return MarkupDescription.from_list(markers)


def scene_carrier_planes(scene, tau=None):
    """Distinct carrier planes of all faces in the scene."""
    t = TAU_GEO if tau is None else tau
    distinct = {}
    for _, face in scene.all_faces():
        distinct.setdefault(face.plane.carrier_key(t), face.plane)
    return [distinct[k] for k in sorted(distinct)]


def compute_epsilon_min(scene, tau=None):
    """Minimum inscribed-disk radius over all bounded arrangement regions.

    For every carrier plane of the scene, intersect it with all other carrier
    planes, build the 2D line arrangement (clipped to 1.5x the scene bounding
    box) and take the smallest inscribed radius over the cells that do not
    touch the clip frame.
    """
    t = TAU_GEO if tau is None else tau
    planes = scene_carrier_planes(scene, t)
    if not planes:
        raise DegenerateScene("scene has no faces")
    lo, hi = scene.bbox()
    center = (lo + hi) / 2.0
    half = float(max(hi - lo)) * 0.75 + 1.0
    best = None
    for p in planes:
        ex, ey = p.frame()
        origin = p.origin()
        lines = []
        for q in planes:
            if q is p:
                continue
            from .geom import plane_plane_line
            hit = plane_plane_line(p, q, t)
            if hit is None:
                continue
            pt, d = hit
            p2 = np.array([float((pt - origin) @ ex), float((pt - origin) @ ey)])
            d2 = np.array([float(d @ ex), float(d @ ey)])
            if np.linalg.norm(d2) < 1e-12:
                continue
            lines.append(Line2.from_point_direction(p2, d2))
        c2 = np.array([float((center - origin) @ ex), float((center - origin) @ ey)])
        bbox = (c2[0] - half, c2[1] - half, c2[0] + half, c2[1] + half)
        arr = build_arrangement(lines, bbox, t)
        for region in arr.bounded_regions():
            r = inscribed_radius(region, t)
            if best is None or r < best:
                best = r
    if best is None or best <= t:
        raise DegenerateScene("no bounded region with positive inscribed radius")
    return best


def place_vertices(scene, with_face_ids=False, with_order=False, tau=None):
    """One bare point marker per vertex; optional (vertex, face) records.

    With face ids on, each (vertex, incident face) pair becomes one marker
    record sharing the position.  With order on, order_index numbers the
    face's boundary clockwise as seen from outside.  Faces must be simple
    (no holes).
    """
    t = TAU_GEO if tau is None else tau
    markers = []
    fid = 0
    for pi, poly in enumerate(scene.polyhedra):
        if not with_face_ids:
            for v in poly.world_vertices():
                markers.append(Marker(np.asarray(v, float),
                                      meta=MarkerMeta(polyhedron_id=pi + 1)))
            continue
        for face in poly.faces:
            if face.polygon.holes:
                raise ValueError("vertex markup requires faces without holes")
            fid += 1
            ring = face.world_rings()[0]
            # outer rings run counterclockwise seen from outside; clockwise
            # traversal is the reverse
            ordered = ring[::-1]
            for k, v in enumerate(ordered):
                meta = MarkerMeta(polyhedron_id=pi + 1, face_id=fid,
                                  order_index=k if with_order else None)
                markers.append(Marker(np.asarray(v, float), meta=meta))
    return MarkupDescription.from_list(markers)
