"""Faces, polyhedra and scenes as boundary representations.

A Face3 couples a carrier plane, an in-plane frame and a Polygon2 expressed
in that frame.  A Polyhedron stores faces only; vertices, edges and the
Euler characteristic are derived.  Faces may carry holes (inner rings), so
the Euler count treats a face with h holes as contributing 1 - h.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidTopology
from .base import TAU_GEO, TAU_AXIS, cross3, cross3_rows, snap_key, snap_keys, unit
from .plane import Plane3
from .polygon import Polygon2, as_ring, ring_area, remove_collinear


@dataclass
class Face3:
    """Planar face embedded in 3D.

    polygon lives in the orthonormal frame (origin, ex, ey); the plane normal
    ex x ey points out of the solid.  `tag` carries placement provenance
    (polyhedron/face/elaboration ids) and has no geometric meaning.
    """

    plane: Plane3
    origin: np.ndarray
    ex: np.ndarray
    ey: np.ndarray
    polygon: Polygon2
    tag: dict = field(default_factory=dict)
    _world: list = field(default=None, init=False, repr=False, compare=False)

    @classmethod
    def from_rings3d(cls, rings, tag=None, plane=None):
        """Build from world-coordinate rings (outer first).

        Without an explicit plane the outer ring's Newell normal becomes the
        outward normal (rings ordered CCW seen from outside).  With a plane
        given, rings are reversed as needed to be CCW in its frame.
        """
        rings = [np.asarray(r, dtype=float) for r in rings]
        if plane is None:
            plane = Plane3.from_point_normal(rings[0][0], newell_normal(rings[0]))
        origin = np.asarray(rings[0][0], dtype=float)
        ex, ey = plane.frame()

        def to2d(ring):
            r = ring - origin
            return np.stack([r @ ex, r @ ey], axis=1)

        outer2d = to2d(rings[0])
        if ring_area(outer2d) < 0:
            rings = [r[::-1] for r in rings]
            outer2d = to2d(rings[0])
        holes2d = []
        for h in rings[1:]:
            h2 = to2d(h)
            if ring_area(h2) > 0:
                h2 = h2[::-1]
            holes2d.append(h2)
        poly = Polygon2(outer2d, holes2d)
        return cls(plane, origin, ex, ey, poly, dict(tag or {}))

    def to_world(self, pt2):
        return self.origin + pt2[0] * self.ex + pt2[1] * self.ey

    def to_frame(self, pt3):
        r = np.asarray(pt3, dtype=float) - self.origin
        return np.array([float(r @ self.ex), float(r @ self.ey)])

    def world_rings(self):
        if self._world is None:
            frame = np.stack([self.ex, self.ey])
            self._world = [self.origin + ring @ frame for ring in self.polygon.rings()]
        return self._world

    def normal(self):
        return self.plane.normal

    def contains_point(self, pt3, tau=None):
        t = TAU_GEO if tau is None else tau
        if abs(self.plane.signed_distance(pt3)) > t:
            return False
        return self.polygon.contains(self.to_frame(pt3), tau) >= 0

    def area(self):
        return self.polygon.area()

    def flipped(self):
        """Same point set, opposite orientation."""
        rings = [r[::-1] for r in self.world_rings()]
        return Face3.from_rings3d(rings, tag=self.tag)


def newell_normal(ring):
    r = np.asarray(ring, dtype=float)
    nxt = np.roll(r, -1, axis=0)
    n = np.array([
        float(np.sum((r[:, 1] - nxt[:, 1]) * (r[:, 2] + nxt[:, 2]))),
        float(np.sum((r[:, 2] - nxt[:, 2]) * (r[:, 0] + nxt[:, 0]))),
        float(np.sum((r[:, 0] - nxt[:, 0]) * (r[:, 1] + nxt[:, 1]))),
    ])
    return unit(n)


@dataclass
class Polyhedron:
    """Closed boundary representation; arbitrary genus."""

    faces: list

    def world_vertices(self):
        seen = {}
        for f in self.faces:
            for ring in f.world_rings():
                for p in ring:
                    seen.setdefault(snap_key(p), np.asarray(p, float))
        return [seen[k] for k in sorted(seen)]

    def directed_edges(self):
        """All (a_key, b_key) boundary steps over all rings of all faces."""
        edges = []
        for fi, f in enumerate(self.faces):
            for ring in f.world_rings():
                n = len(ring)
                for i in range(n):
                    edges.append((snap_key(ring[i]), snap_key(ring[(i + 1) % n]), fi))
        return edges

    def edge_count(self):
        und = {tuple(sorted((a, b))) for a, b, _ in self.directed_edges()}
        return len(und)

    def euler_characteristic(self):
        v = len(self.world_vertices())
        e = self.edge_count()
        f = sum(1 - len(fc.polygon.holes) for fc in self.faces)
        return v - e + f

    def genus(self):
        chi = self.euler_characteristic()
        if (2 - chi) % 2 != 0:
            raise InvalidTopology(f"odd Euler defect: chi={chi}")
        return (2 - chi) // 2

    def signed_volume(self):
        total = 0.0
        for f in self.faces:
            for ring in f.world_rings():
                if len(ring) < 3:
                    continue
                v1 = ring[1:-1] - ring[0]
                v2 = ring[2:] - ring[0]
                total += float(np.einsum("j,ij->", ring[0], cross3_rows(v1, v2))) / 6.0
        return total

    def contains_point(self, pt, tau=None):
        """Parity ray test; points on the boundary count as contained."""
        t = TAU_GEO if tau is None else tau
        p = np.asarray(pt, dtype=float)
        for f in self.faces:
            if f.contains_point(p, t):
                return True
        direction = unit(np.array([0.577350123, 0.711238345, 0.40190712]))
        hits = 0
        for f in self.faces:
            denom = float(np.dot(f.plane.normal, direction))
            if abs(denom) < 1e-12:
                continue
            s = -f.plane.signed_distance(p) / denom
            if s <= t:
                continue
            q = p + s * direction
            if f.polygon.contains(f.to_frame(q), t) >= 0:
                hits += 1
        return hits % 2 == 1

    def refined_rings(self, tau=None):
        """World rings with every polyhedron vertex lying on an edge inserted.

        Faces adjacent to finer-subdivided neighbors (T-junctions, split
        faces) get the missing vertices added as 180-degree ring points, so
        that edge pairing works at the micro-edge level.
        """
        t = TAU_GEO if tau is None else tau
        verts = np.array(self.world_vertices())
        vkeys = snap_keys(verts, t)
        refined = []
        for f in self.faces:
            rings = []
            for ring in f.world_rings():
                n = len(ring)
                a = ring
                b = np.roll(ring, -1, axis=0)
                ab = b - a
                ln2 = np.einsum("ij,ij->i", ab, ab)
                # s[i, v] = parameter of vertex v along edge i
                diff = verts[None, :, :] - a[:, None, :]
                s = np.einsum("ivj,ij->iv", diff, ab) / np.maximum(ln2[:, None], 1e-300)
                proj = a[:, None, :] + s[..., None] * ab[:, None, :]
                dist = np.linalg.norm(verts[None, :, :] - proj, axis=2)
                onseg = (s > 0.0) & (s < 1.0) & (dist <= 10 * t) & (ln2[:, None] > t * t)
                ring_keys = snap_keys(ring, t)
                new_ring = []
                for i in range(n):
                    new_ring.append(a[i])
                    hits = np.nonzero(onseg[i])[0]
                    if len(hits) == 0:
                        continue
                    ka, kb = ring_keys[i], ring_keys[(i + 1) % n]
                    inner = [(float(s[i, v]), verts[v]) for v in hits
                             if vkeys[v] != ka and vkeys[v] != kb]
                    for _, v in sorted(inner, key=lambda sv: sv[0]):
                        new_ring.append(v)
                rings.append(np.array(new_ring))
            refined.append(rings)
        return refined

    def validate(self, tau=None):
        """Check the closed-manifold invariants; raises InvalidTopology."""
        t = TAU_GEO if tau is None else tau
        if not self.faces:
            raise InvalidTopology("polyhedron has no faces")
        for i, f in enumerate(self.faces):
            for ring in f.world_rings():
                if len(ring) < 3:
                    raise InvalidTopology(f"face {i} has a ring with <3 vertices")
                for p in ring:
                    if abs(f.plane.signed_distance(p)) > 10 * t:
                        raise InvalidTopology(f"face {i} ring leaves its plane")
            if not f.polygon.is_valid(t):
                raise InvalidTopology(f"face {i} polygon invalid (simplicity/orientation)")
        refined = self.refined_rings(t)
        pairing = {}
        for fi, rings in enumerate(refined):
            for ring in rings:
                n = len(ring)
                for i in range(n):
                    a, b = snap_key(ring[i], t), snap_key(ring[(i + 1) % n], t)
                    if a == b:
                        raise InvalidTopology("zero-length edge")
                    if (a, b) in pairing:
                        raise InvalidTopology(f"directed edge used twice: {a}->{b}")
                    pairing[(a, b)] = fi
        for (a, b) in pairing:
            if (b, a) not in pairing:
                raise InvalidTopology(f"edge {a}->{b} lacks an opposite twin")
        if self.signed_volume() <= t:
            raise InvalidTopology("non-positive enclosed volume (orientation or openness)")
        self._validate_vertex_cycles(refined)
        return True

    def _validate_vertex_cycles(self, refined):
        """Faces around each vertex must form a single edge-connected cycle."""
        corners = {}
        for rings in refined:
            for ring in rings:
                n = len(ring)
                for i in range(n):
                    v = snap_key(ring[i])
                    prv = snap_key(ring[i - 1])
                    nxt = snap_key(ring[(i + 1) % n])
                    corners.setdefault(v, []).append((prv, nxt))
        for v, cs in corners.items():
            # walk corner -> corner across shared edges: corner (p, n) links to
            # the corner whose incoming edge is the reverse of our outgoing one
            outgoing = {}
            for (p, n) in cs:
                if n in outgoing:
                    raise InvalidTopology(f"vertex {v}: two corners share outgoing edge")
                outgoing[n] = (p, n)
            start = cs[0]
            seen = 1
            cur = start
            while True:
                nxt = outgoing.get(cur[0])
                if nxt is None:
                    raise InvalidTopology(f"vertex {v}: corner fan is open")
                if nxt == start:
                    break
                cur = nxt
                seen += 1
                if seen > len(cs):
                    raise InvalidTopology(f"vertex {v}: corner walk does not close")
            if seen != len(cs):
                raise InvalidTopology(f"vertex {v}: faces form {len(cs) - seen + 1} fans")


@dataclass
class Scene:
    """Finite set of polyhedra (the model class element)."""

    polyhedra: list

    def validate(self, tau=None):
        for p in self.polyhedra:
            p.validate(tau)
        return True

    def all_faces(self):
        for pi, p in enumerate(self.polyhedra):
            for f in p.faces:
                yield pi, f

    def bbox(self):
        pts = [p for poly in self.polyhedra for p in poly.world_vertices()]
        arr = np.array(pts)
        return arr.min(axis=0), arr.max(axis=0)


def is_convex(poly, tau=None):
    """True iff every face plane has the whole polyhedron on one side."""
    t = TAU_GEO if tau is None else tau
    verts = poly.world_vertices()
    for f in poly.faces:
        n, d = f.plane.normal, f.plane.offset
        for v in verts:
            if float(np.dot(n, v)) - d > 100 * t:
                return False
    return True


def is_orthogonal(scene, tau_axis=None):
    """True iff every face normal is axis-parallel within the axis tolerance."""
    ta = TAU_AXIS if tau_axis is None else tau_axis
    import math
    polys = scene.polyhedra if isinstance(scene, Scene) else [scene]
    for p in polys:
        for f in p.faces:
            n = f.plane.normal
            if math.acos(min(1.0, max(abs(float(c)) for c in n))) > ta:
                return False
    return True


def make_box(lo, hi):
    """Axis-aligned box polyhedron from min/max corners."""
    x0, y0, z0 = (float(c) for c in lo)
    x1, y1, z1 = (float(c) for c in hi)
    quads = [
        [(x0, y0, z0), (x0, y1, z0), (x1, y1, z0), (x1, y0, z0)],
        [(x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1)],
        [(x0, y0, z0), (x1, y0, z0), (x1, y0, z1), (x0, y0, z1)],
        [(x0, y1, z0), (x0, y1, z1), (x1, y1, z1), (x1, y1, z0)],
        [(x0, y0, z0), (x0, y0, z1), (x0, y1, z1), (x0, y1, z0)],
        [(x1, y0, z0), (x1, y1, z0), (x1, y1, z1), (x1, y0, z1)],
    ]
    return Polyhedron([Face3.from_rings3d([np.array(q, dtype=float)]) for q in quads])


def orient_faces(faces, tau=None):
    """Flip faces to a consistent outward orientation.

    Propagates orientation across shared edges, then uses the global signed
    volume to decide outward.  Raises InvalidTopology on non-orientable or
    open input.
    """
    t = TAU_GEO if tau is None else tau
    faces = list(faces)
    edge_map = {}
    for fi, f in enumerate(faces):
        for ring in f.world_rings():
            n = len(ring)
            for i in range(n):
                a, b = snap_key(ring[i]), snap_key(ring[(i + 1) % n])
                edge_map.setdefault(tuple(sorted((a, b))), []).append((fi, a, b))
    for k, uses in edge_map.items():
        if len(uses) != 2:
            raise InvalidTopology(f"edge {k} used by {len(uses)} faces")
    flipped = [None] * len(faces)
    original_edges = []
    for fi, f in enumerate(faces):
        mine = []
        for ring in f.world_rings():
            n = len(ring)
            for i in range(n):
                mine.append((snap_key(ring[i]), snap_key(ring[(i + 1) % n])))
        original_edges.append(mine)
    for start in range(len(faces)):
        if flipped[start] is not None:
            continue
        flipped[start] = False
        stack = [start]
        while stack:
            fi = stack.pop()
            for (oa, ob) in original_edges[fi]:
                a, b = (ob, oa) if flipped[fi] else (oa, ob)
                for (gi, ga, gb) in edge_map[tuple(sorted((a, b)))]:
                    if gi == fi:
                        continue
                    # neighbor's effective traversal must be (b, a)
                    want_flip = (ga, gb) != (b, a)
                    if flipped[gi] is None:
                        flipped[gi] = want_flip
                        stack.append(gi)
                    elif flipped[gi] != want_flip:
                        raise InvalidTopology("faces are not orientable consistently")
    out = [f.flipped() if fl else f for f, fl in zip(faces, flipped)]
    vol = Polyhedron(out).signed_volume()
    if vol < 0:
        out = [f.flipped() for f in out]
    return out
