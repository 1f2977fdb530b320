"""Vertex-markup engines: connect-the-dots for orthogonal shapes, and face
recovery from (vertex, face-id) records.

The 2D connect-the-dots pairs consecutive vertices per row and per column;
the 3D extension pairs along every axis line and then recovers faces by
running the 2D pass inside each axis-aligned plane.  Both require the no
180-degree-vertex condition.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import (AssemblyFailed, FaceAssemblyFailed, NonManifold,
                      NonPlanarFaceGroup, OddColumnCount, OddLineCount,
                      OddRowCount, SelfIntersectingBoundary)
from ..geom import (Face3, Plane3, Polygon2, Polyhedron, Scene, TAU_GEO,
                    convex_hull_2d, orient_faces, point_in_ring, ring_area,
                    ring_is_simple)
from ..geom.base import snap_key
from ..geom.polygon import merge_regions


@dataclass(frozen=True)
class VertexRecord:
    position: tuple
    face_id: int | None = None
    order_index: int | None = None


def _pair_rows(points, coord, err):
    """Pair consecutive points along `coord` within groups of the other one."""
    other = 1 - coord
    rows = {}
    for p in points:
        rows.setdefault(round(p[other] / TAU_GEO), []).append(p)
    segments = []
    for key in sorted(rows):
        row = sorted(rows[key], key=lambda p: p[coord])
        if len(row) % 2 != 0:
            raise err(f"group at {row[0][other]:.6g} has {len(row)} vertices")
        for i in range(0, len(row), 2):
            segments.append((row[i], row[i + 1]))
    return segments


def connect_dots_2d(vertices, tau=None):
    """Orthogonal polygons from their vertex set (no 180-degree vertices).

    Pairs first-to-second, third-to-fourth per row and per column; returns a
    list of Polygon2 (holes assigned by containment parity).
    """
    t = TAU_GEO if tau is None else tau
    pts = [np.asarray(p, dtype=float)[:2] for p in vertices]
    horizontal = _pair_rows(pts, 0, OddRowCount)
    vertical = _pair_rows(pts, 1, OddColumnCount)

    # crossing segments mean the vertex set is not a valid orthogonal family
    for a, b in horizontal:
        y = a[1]
        x0, x1 = sorted((a[0], b[0]))
        for c, d in vertical:
            x = c[0]
            y0, y1 = sorted((c[1], d[1]))
            if x0 + t < x < x1 - t and y0 + t < y < y1 - t:
                raise NonManifold("row and column pairings cross")

    succ = {}
    for a, b in horizontal + vertical:
        ka, kb = snap_key(a, t), snap_key(b, t)
        succ.setdefault(ka, []).append(kb)
        succ.setdefault(kb, []).append(ka)
    coords = {}
    for p in pts:
        coords[snap_key(p, t)] = p
    for k, nbrs in succ.items():
        if len(nbrs) != 2:
            raise NonManifold(f"vertex {coords[k]} has degree {len(nbrs)}")

    rings = []
    visited = set()
    for start in sorted(succ):
        if start in visited:
            continue
        ring_keys = [start]
        visited.add(start)
        prev, cur = None, start
        while True:
            nbrs = [k for k in succ[cur] if k != prev]
            if not nbrs:
                raise NonManifold("open chain in pairing")
            nxt = nbrs[0]
            if nxt == start:
                break
            if nxt in visited:
                raise NonManifold("pairing chains merge")
            visited.add(nxt)
            ring_keys.append(nxt)
            prev, cur = cur, nxt
        rings.append(np.array([coords[k] for k in ring_keys]))

    for ring in rings:
        if not ring_is_simple(ring, t):
            raise NonManifold("pairing produced a self-intersecting ring")

    # assign rings by containment parity: even depth = outer, odd = hole
    polys = []
    depth = []
    for r in rings:
        d = sum(1 for other in rings
                if other is not r and point_in_ring(r[0], other, t) > 0)
        depth.append(d)
    outers = [i for i, d in enumerate(depth) if d % 2 == 0]
    for i in outers:
        ring = rings[i]
        holes = []
        for j, d in enumerate(depth):
            if d % 2 == 1 and point_in_ring(rings[j][0], ring, t) > 0:
                hosts = [k for k in outers
                         if point_in_ring(rings[j][0], rings[k], t) > 0]
                smallest = min(hosts, key=lambda k: abs(ring_area(rings[k])))
                if smallest == i:
                    holes.append(rings[j])
        polys.append(Polygon2.make(ring, holes))
    return polys


def connect_dots_3d(vertices, tau=None):
    """Orthogonal polyhedron from its vertex set (paper's 3D extension).

    Pairs consecutive vertices along every axis-parallel line to form the
    wireframe (every vertex must meet exactly one segment per axis), then
    recovers faces by running the 2D engine on each axis-aligned plane's
    vertex trace.  The resulting faces must assemble into a closed manifold.
    """
    t = TAU_GEO if tau is None else tau
    pts = [np.asarray(p, dtype=float) for p in vertices]
    keys = {snap_key(p, t): p for p in pts}
    if len(keys) != len(pts):
        raise NonManifold("duplicate vertices")

    edges_per_axis = []
    incident = {k: [set(), set(), set()] for k in keys}
    for axis in range(3):
        o1, o2 = [a for a in range(3) if a != axis]
        lines = {}
        for k, p in keys.items():
            lines.setdefault((round(p[o1] / t), round(p[o2] / t)), []).append(p)
        segs = []
        for lk in sorted(lines):
            col = sorted(lines[lk], key=lambda p: p[axis])
            if len(col) % 2 != 0:
                raise OddLineCount(
                    f"axis-{axis} line {lk} has {len(col)} vertices")
            for i in range(0, len(col), 2):
                a, b = col[i], col[i + 1]
                segs.append((a, b))
                incident[snap_key(a, t)][axis].add(snap_key(b, t))
                incident[snap_key(b, t)][axis].add(snap_key(a, t))
        edges_per_axis.append(segs)

    for k, per_axis in incident.items():
        degs = [len(s) for s in per_axis]
        if sorted(degs) != [0, 1, 1] and degs != [1, 1, 1]:
            raise NonManifold(
                f"vertex {keys[k]} meets {sum(degs)} segments ({degs})")

    wire_keys = set()
    for segs in edges_per_axis:
        for a, b in segs:
            wire_keys.add(tuple(sorted((snap_key(a, t), snap_key(b, t)))))

    faces = []
    for axis in range(3):
        planes = {}
        for k, p in keys.items():
            planes.setdefault(round(p[axis] / t), []).append(p)
        for pk in sorted(planes):
            group = planes[pk]
            if len(group) < 4:
                continue
            o1, o2 = [a for a in range(3) if a != axis]
            flat = [np.array([p[o1], p[o2]]) for p in group]
            try:
                polys = connect_dots_2d(flat, t)
            except (OddRowCount, OddColumnCount, NonManifold) as exc:
                raise FaceAssemblyFailed(
                    f"plane trace at axis {axis} failed: {exc}") from exc
            level = float(group[0][axis])
            for poly in polys:
                rings3 = []
                for ring in poly.rings():
                    r3 = np.zeros((len(ring), 3))
                    r3[:, o1] = ring[:, 0]
                    r3[:, o2] = ring[:, 1]
                    r3[:, axis] = level
                    rings3.append(r3)
                # only keep faces whose edges are wireframe segments
                ok = True
                for r3 in rings3:
                    n = len(r3)
                    for i in range(n):
                        ek = tuple(sorted((snap_key(r3[i], t),
                                           snap_key(r3[(i + 1) % n], t))))
                        if ek not in wire_keys:
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    faces.append(Face3.from_rings3d(rings3))

    try:
        oriented = orient_faces(faces, t)
        poly = Polyhedron(oriented)
        poly.validate(t)
    except Exception as exc:
        raise FaceAssemblyFailed(f"recovered faces do not close: {exc}") from exc
    return poly


def _assemble(faces, tau):
    """Group faces into edge-connected components, orient, validate."""
    t = tau
    edge_map = {}
    for i, f in enumerate(faces):
        for ring in f.world_rings():
            n = len(ring)
            for j in range(n):
                k = tuple(sorted((snap_key(ring[j], t), snap_key(ring[(j + 1) % n], t))))
                edge_map.setdefault(k, []).append(i)
    parent = list(range(len(faces)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for uses in edge_map.values():
        for other in uses[1:]:
            ra, rb = find(uses[0]), find(other)
            if ra != rb:
                parent[ra] = rb
    comps = {}
    for i in range(len(faces)):
        comps.setdefault(find(i), []).append(i)
    polys = []
    for idxs in comps.values():
        group = [faces[i] for i in idxs]
        try:
            oriented = orient_faces(group, t)
            poly = Polyhedron(oriented)
            poly.validate(t)
        except Exception as exc:
            raise AssemblyFailed(f"faces do not close into a polyhedron: {exc}",
                                 open_edges=[k for k, v in edge_map.items()
                                             if len(v) != 2]) from exc
        polys.append(poly)
    return Scene(polys)


def faces_from_hulls(records, tau=None):
    """Scene from (vertex, face-id) records: each face is the 2D convex hull
    of its vertices (faces must be convex)."""
    t = TAU_GEO if tau is None else tau
    groups = {}
    for r in records:
        if r.face_id is None:
            raise AssemblyFailed("records need face ids")
        groups.setdefault(r.face_id, []).append(np.asarray(r.position, float))
    faces = []
    for fid in sorted(groups):
        pts = np.array(groups[fid])
        if len(pts) < 3:
            raise NonPlanarFaceGroup(f"face {fid} has {len(pts)} vertices")
        plane = _fit_exact_plane(pts, fid, t)
        ex, ey = plane.frame()
        origin = pts[0]
        flat = np.stack([(pts - origin) @ ex, (pts - origin) @ ey], axis=1)
        hull = convex_hull_2d(flat, t)
        if len(hull) < 3 or len(hull) < len({snap_key(p, t) for p in flat}):
            raise NonPlanarFaceGroup(
                f"face {fid}: vertices are not in convex position")
        ring3 = np.array([origin + u * ex + v * ey for u, v in hull])
        faces.append(Face3.from_rings3d([ring3], tag={"face_id": fid}))
    return _assemble(faces, t)


def faces_from_ordered(records, tau=None):
    """Scene from (vertex, face-id, order) records: face boundaries follow
    the given cyclic order, so nonconvex faces work."""
    t = TAU_GEO if tau is None else tau
    groups = {}
    for r in records:
        if r.face_id is None or r.order_index is None:
            raise AssemblyFailed("records need face ids and order indices")
        groups.setdefault(r.face_id, []).append(r)
    faces = []
    for fid in sorted(groups):
        rs = sorted(groups[fid], key=lambda r: r.order_index)
        pts = np.array([np.asarray(r.position, float) for r in rs])
        if len(pts) < 3:
            raise NonPlanarFaceGroup(f"face {fid} has {len(pts)} vertices")
        plane = _fit_exact_plane(pts, fid, t)
        ex, ey = plane.frame()
        origin = pts[0]
        flat = np.stack([(pts - origin) @ ex, (pts - origin) @ ey], axis=1)
        if not ring_is_simple(flat, t):
            raise SelfIntersectingBoundary(
                f"face {fid}: ordered boundary crosses itself")
        faces.append(Face3.from_rings3d([pts], tag={"face_id": fid}))
    return _assemble(faces, t)


def _fit_exact_plane(pts, fid, t):
    p0 = pts[0]
    normal = None
    for i in range(1, len(pts)):
        for j in range(i + 1, len(pts)):
            n = np.cross(pts[i] - p0, pts[j] - p0)
            ln = float(np.linalg.norm(n))
            if ln > 1e-9:
                normal = n / ln
                break
        if normal is not None:
            break
    if normal is None:
        raise NonPlanarFaceGroup(f"face {fid}: vertices are collinear")
    plane = Plane3.from_point_normal(p0, normal)
    for p in pts:
        if abs(plane.signed_distance(p)) > 100 * t:
            raise NonPlanarFaceGroup(f"face {fid}: vertices are not coplanar")
    return plane
