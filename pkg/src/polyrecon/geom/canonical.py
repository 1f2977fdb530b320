"""Canonical forms for faces, polyhedra and scenes.

Two polyhedra describe the same point set iff their canonical forms compare
equal after tau-grid snapping: coplanar adjacent faces are merged, collinear
vertices removed, rings rotated to their lexicographic minimum and faces
sorted.  Canonical keys are nested tuples, so scene equality and oracle
deduplication reduce to tuple comparison.
"""

import numpy as np

from .base import TAU_GEO, cross3_rows, snap_key
from .polygon import merge_regions
from .polyhedron import Face3, Polyhedron, Scene


def _remove_collinear_3d(ring, tau):
    n = len(ring)
    if n < 3:
        return ring
    prev = np.roll(ring, 1, axis=0)
    nxt = np.roll(ring, -1, axis=0)
    turn = np.linalg.norm(cross3_rows(ring - prev, nxt - ring), axis=1)
    spread = np.linalg.norm(nxt - prev, axis=1)
    keep = np.nonzero((turn > tau) | (spread <= tau))[0]
    return ring if len(keep) == n else ring[keep]


def _merge_coplanar(faces, tau):
    groups = {}
    for f in faces:
        groups.setdefault(f.plane.oriented_key(tau * 10), []).append(f)
    out = []
    for key in sorted(groups):
        members = groups[key]
        if len(members) == 1:
            out.append(members[0])
            continue
        ref = members[0]
        rings2d = []
        for f in members:
            rings2d.append([np.array([ref.to_frame(p) for p in ring])
                            for ring in f.world_rings()])
        merged = merge_regions(rings2d, tau)
        for poly in merged:
            rings3d = [np.array([ref.to_world(p) for p in poly.outer])]
            rings3d += [np.array([ref.to_world(p) for p in h]) for h in poly.holes]
            out.append(Face3.from_rings3d(rings3d, tag=ref.tag, plane=ref.plane))
    return out


def _canonical_ring(ring, tau):
    r = _remove_collinear_3d(np.asarray(ring, dtype=float), tau)
    keys = [snap_key(p, tau) for p in r]
    start = min(range(len(keys)), key=lambda i: keys[i])
    return np.roll(r, -start, axis=0)


def canonicalize(poly, tau=None, validate=True):
    """Canonical form of a polyhedron; idempotent."""
    t = TAU_GEO if tau is None else tau
    if validate:
        poly.validate(t)
    faces = _merge_coplanar(list(poly.faces), t)
    canon_faces = []
    for f in faces:
        rings = [_canonical_ring(r, t) for r in f.world_rings()]
        outer, holes = rings[0], rings[1:]
        holes.sort(key=lambda r: snap_key(r[0], t))
        canon_faces.append(Face3.from_rings3d([outer] + holes, tag=f.tag, plane=f.plane))
    canon_faces.sort(key=lambda f: face_key(f, t))
    return Polyhedron(canon_faces)


def face_key(face, tau=None):
    t = TAU_GEO if tau is None else tau
    rings = face.world_rings()
    return tuple(tuple(snap_key(p, t) for p in ring) for ring in rings)


def polyhedron_key(poly, tau=None, canonical=False, validate=True):
    t = TAU_GEO if tau is None else tau
    p = poly if canonical else canonicalize(poly, t, validate=validate)
    return tuple(face_key(f, t) for f in p.faces)


def scene_key(scene, tau=None, validate=True):
    t = TAU_GEO if tau is None else tau
    keys = sorted(polyhedron_key(p, t, validate=validate) for p in scene.polyhedra)
    return tuple(keys)


def canonical_scene(scene, tau=None):
    t = TAU_GEO if tau is None else tau
    polys = [canonicalize(p, t) for p in scene.polyhedra]
    polys.sort(key=lambda p: polyhedron_key(p, t, canonical=True))
    return Scene(polys)


def polyhedra_equal(a, b, tau=None, validate=True):
    t = TAU_GEO if tau is None else tau
    return polyhedron_key(a, t, validate=validate) == polyhedron_key(b, t, validate=validate)


def scenes_equal(a, b, tau=None, validate=True):
    """Multiset equality of canonicalized polyhedra."""
    t = TAU_GEO if tau is None else tau
    return scene_key(a, t, validate=validate) == scene_key(b, t, validate=validate)


def scene_diff(a, b, tau=None):
    """Human-readable canonical difference, empty string when equal."""
    t = TAU_GEO if tau is None else tau
    ka, kb = scene_key(a, t), scene_key(b, t)
    if ka == kb:
        return ""
    lines = [f"scenes differ: {len(ka)} vs {len(kb)} polyhedra"]
    only_a = [k for k in ka if k not in kb]
    only_b = [k for k in kb if k not in ka]
    for k in only_a[:3]:
        lines.append(f"  only in first: polyhedron with {len(k)} faces, "
                     f"first vertex {k[0][0][0] if k else '?'}")
    for k in only_b[:3]:
        lines.append(f"  only in second: polyhedron with {len(k)} faces, "
                     f"first vertex {k[0][0][0] if k else '?'}")
    return "\n".join(lines)


def max_vertex_distance(a, b):
    """Max over vertices of `a` of the distance to the nearest vertex of `b`."""
    va = np.array(a.world_vertices())
    vb = np.array(b.world_vertices())
    d = np.linalg.norm(va[:, None, :] - vb[None, :, :], axis=2)
    return max(float(d.min(axis=1).max()), float(d.min(axis=0).max()))
