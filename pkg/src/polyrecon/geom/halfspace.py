"""Intersection of half-spaces as an explicit boundary representation.

Vertices are enumerated as feasible triple-plane intersections (each vertex
solved once and shared by every face that uses it, so edge pairing is exact);
faces collect their incident vertices in angular order.  Six far-away seed
planes are mixed in: any face left on a seed plane means the true
intersection is unbounded.
"""

import math

import numpy as np

from ..errors import Degenerate, Empty, Unbounded
from .base import TAU_GEO, cross3_rows, snap_key
from .plane import Plane3
from .polyhedron import Face3, Polyhedron


def _dedupe_leq(halfspaces, tau):
    """Collapse half-spaces sharing an oriented normal; keep the tightest."""
    by_normal = {}
    order = []
    for idx, hs in enumerate(halfspaces):
        n, d = hs.as_leq()
        key = tuple(round(float(c) / 1e-9) for c in n)
        if key in by_normal:
            j = by_normal[key]
            if d < order[j][1]:
                order[j] = (order[j][0], d, idx)
        else:
            by_normal[key] = len(order)
            order.append((n, d, idx))
    return [(n, d, src) for (n, d, src) in order]


def intersect_halfspaces(halfspaces, seed_halfwidth=None, tau=None):
    """Boundary representation of the intersection of closed half-spaces.

    Raises Unbounded / Empty / Degenerate.  Each returned face carries
    tag['source'] = index of the half-space whose boundary supports it,
    so callers can detect redundant planes.
    """
    t = TAU_GEO if tau is None else tau
    if not halfspaces:
        raise ValueError("need at least one half-space")
    constraints = _dedupe_leq(halfspaces, t)
    if seed_halfwidth is None:
        scale = max(1.0, max(abs(d) for _, d, _ in constraints))
        seed_halfwidth = 64.0 * scale
    r = float(seed_halfwidth)
    for axis in range(3):
        for sgn in (1.0, -1.0):
            n = np.zeros(3)
            n[axis] = sgn
            constraints.append((n, r, None))

    normals = np.array([c[0] for c in constraints])
    offsets = np.array([c[1] for c in constraints])
    m = len(constraints)
    feas_tol = max(100 * t, 1e-7)

    # enumerate vertices as feasible triple intersections (batched solves)
    from itertools import combinations
    triples = np.array(list(combinations(range(m), 3)))
    a = normals[triples]                       # (N, 3, 3)
    b = offsets[triples]                       # (N, 3)
    dets = np.abs(np.linalg.det(a))
    ok = dets > 1e-10
    if not np.any(ok):
        raise Empty("half-space intersection has no interior")
    sols = np.linalg.solve(a[ok], b[ok][:, :, None])[:, :, 0]   # (K, 3)
    feas = np.all(sols @ normals.T - offsets <= feas_tol, axis=1)
    pts = sols[feas]
    if len(pts) == 0:
        raise Empty("half-space intersection has no interior")
    verts = {}
    for v in pts:
        verts.setdefault(snap_key(v, max(t, 1e-9)), v)
    arr = np.array(list(verts.values()))
    on_plane = np.abs(arr @ normals.T - offsets) <= feas_tol

    faces = []
    used_sources = set()
    for ci in range(m):
        idxs = np.nonzero(on_plane[:, ci])[0]
        if len(idxs) < 3:
            continue
        pts = arr[idxs]
        plane = Plane3(normals[ci], float(offsets[ci]))
        ex, ey = plane.frame()
        center = pts.mean(axis=0)
        ang = np.arctan2((pts - center) @ ey, (pts - center) @ ex)
        ring = pts[np.argsort(ang)]
        # drop duplicates and near-collinear sliver points
        ring = _clean_ring(ring, t)
        if ring is None:
            continue
        src = constraints[ci][2]
        if src is None:
            raise Unbounded("intersection reaches the seed box; not a closed volume")
        used_sources.add(src)
        faces.append(Face3.from_rings3d([ring], tag={"source": src}, plane=plane))

    if not faces:
        raise Empty("no face survived; intersection has no interior")
    poly = Polyhedron(faces)
    vol = poly.signed_volume()
    if abs(vol) <= max(t, 1e-12):
        raise Degenerate("intersection interior collapses to <= 2 dimensions")
    return poly


def _clean_ring(ring, tau):
    out = []
    for p in ring:
        if not out or np.linalg.norm(p - out[-1]) > max(tau, 1e-9):
            out.append(p)
    if len(out) >= 2 and np.linalg.norm(out[0] - out[-1]) <= max(tau, 1e-9):
        out.pop()
    if len(out) < 3:
        return None
    r = np.array(out)
    # reject zero-area rings (slivers from tangent planes)
    area2 = float(np.linalg.norm(cross3_rows(r[1:-1] - r[0], r[2:] - r[0]), axis=1).sum())
    if area2 <= max(tau, 1e-12):
        return None
    return r


def redundant_sources(poly, n_inputs):
    """Input indices whose plane supports no face of the result."""
    used = {f.tag.get("source") for f in poly.faces}
    return [i for i in range(n_inputs) if i not in used]
