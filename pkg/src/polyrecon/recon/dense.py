"""Dense-markup reconstruction: arrangement regions that contain a marker.

For each distinct marker plane, the plane is partitioned along its
intersection lines with all other marker planes; regions holding at least
one marker are kept and merged into faces, which must assemble into closed
polyhedra.  Correct whenever the markup is denser than the scene's minimum
region inscribed radius.
"""

import math
import random

import numpy as np

from ..errors import AssemblyFailed
from ..geom import (Face3, Line2, Polygon2, Polyhedron, Scene, TAU_GEO,
                    build_arrangement, plane_plane_line, point_in_ring)
from ..geom.base import snap_key
from ..geom.polygon import merge_regions
from .vertex import _assemble


def _distinct_planes(markup, tau):
    planes = {}
    for mid, m in markup.items():
        p = m.carrier_plane()
        if p is None:
            raise ValueError("dense engine needs point-plane markers")
        planes.setdefault(p.carrier_key(tau), (p, []))
        planes[p.carrier_key(tau)][1].append(mid)
    return planes


def reconstruct_dense(markup, tau=None):
    """Scene from sufficiently dense point-plane markup.

    Keeps every arrangement region containing a marker, merges adjacent kept
    regions into faces, and assembles faces by shared-edge matching; raises
    AssemblyFailed (with the open edges) when the kept faces do not close.
    """
    t = TAU_GEO if tau is None else tau
    plane_groups = _distinct_planes(markup, t)
    positions = {mid: m.position for mid, m in markup.items()}
    all_pos = np.array([m.position for m in markup.values()])
    lo = all_pos.min(axis=0)
    hi = all_pos.max(axis=0)
    pad = float(max(hi - lo)) * 0.25 + 1.0

    faces = []
    for key in sorted(plane_groups):
        plane, mids = plane_groups[key]
        ex, ey = plane.frame()
        origin = plane.origin()

        lines = []
        for other_key in sorted(plane_groups):
            if other_key == key:
                continue
            q = plane_groups[other_key][0]
            hit = plane_plane_line(plane, q, t)
            if hit is None:
                continue
            pt, d = hit
            p2 = np.array([float((pt - origin) @ ex), float((pt - origin) @ ey)])
            d2 = np.array([float(d @ ex), float(d @ ey)])
            if np.linalg.norm(d2) < 1e-12:
                continue
            lines.append(Line2.from_point_direction(p2, d2))

        mine = np.array([positions[i] for i in mids])
        pts2 = np.stack([(mine - origin) @ ex, (mine - origin) @ ey], axis=1)
        bbox = (float(pts2[:, 0].min() - pad), float(pts2[:, 1].min() - pad),
                float(pts2[:, 0].max() + pad), float(pts2[:, 1].max() + pad))
        arr = build_arrangement(lines, bbox, t)

        kept = []
        for region in arr.regions:
            # under the density precondition every true face cell contains a
            # strictly interior marker, so boundary grazes do not count
            if any(point_in_ring(p, region.outer, t) > 0 for p in pts2):
                kept.append(region.rings())
        if not kept:
            continue
        merged = merge_regions(kept, t)
        for poly in merged:
            rings3 = []
            for ring in poly.rings():
                rings3.append(np.array([origin + u * ex + v * ey
                                        for u, v in ring]))
            faces.append(Face3.from_rings3d(rings3, plane=plane))

    if not faces:
        raise AssemblyFailed("no face regions were kept", open_edges=[])
    return _assemble(faces, t)


def verify_density(markup, scene, samples_per_face=10 ** 4, seed=0, tau=None):
    """True iff sampled face points all lie within the scene's epsilon_min of
    a marker (test-side oracle; the scene must be known)."""
    from ..placement import compute_epsilon_min

    t = TAU_GEO if tau is None else tau
    if not scene.polyhedra:
        return True
    eps = compute_epsilon_min(scene, t)
    pos = np.array([m.position for m in markup.values()])
    if len(pos) == 0:
        return False
    rng = random.Random(seed)
    for _, face in scene.all_faces():
        xmin, ymin, xmax, ymax = face.polygon.bbox()
        got = 0
        while got < samples_per_face:
            batch = np.column_stack([
                np.array([rng.uniform(xmin, xmax) for _ in range(256)]),
                np.array([rng.uniform(ymin, ymax) for _ in range(256)])])
            inside = [p for p in batch if face.polygon.contains(p, t) >= 0]
            if not inside:
                continue
            pts3 = np.array([face.to_world(p) for p in inside])
            d = np.linalg.norm(pts3[:, None, :] - pos[None, :, :], axis=2)
            if float(d.min(axis=1).max()) > eps:
                return False
            got += len(inside)
    return True
