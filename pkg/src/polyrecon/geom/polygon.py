"""2D polygon machinery: rings, orientation, containment, clipping, merging.

A ring is an (k, 2) float array of vertices without a repeated closing point.
A Polygon2 is one outer ring (counterclockwise) plus zero or more inner rings
(clockwise holes).
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateRegion
from .base import TAU_GEO, cross2, snap_key


def as_ring(points):
    r = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(r) >= 2 and snap_key(r[0]) == snap_key(r[-1]):
        r = r[:-1]
    return r


def ring_area(ring):
    """Signed area; positive for counterclockwise rings."""
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def remove_collinear(ring, tau=None):
    """Drop vertices joining collinear edges (180-degree vertices)."""
    t = TAU_GEO if tau is None else tau
    n = len(ring)
    if n < 3:
        return ring
    keep = []
    for i in range(n):
        a, b, c = ring[i - 1], ring[i], ring[(i + 1) % n]
        if abs(cross2(b - a, c - b)) > t or np.linalg.norm(c - a) <= t:
            keep.append(i)
    if len(keep) == n:
        return ring
    return ring[keep]


def dedupe_consecutive(ring, tau=None):
    t = TAU_GEO if tau is None else tau
    out = []
    for p in ring:
        if not out or np.linalg.norm(p - out[-1]) > t:
            out.append(p)
    if len(out) >= 2 and np.linalg.norm(out[0] - out[-1]) <= t:
        out.pop()
    return np.array(out) if out else np.zeros((0, 2))


def point_in_ring(point, ring, tau=None):
    """+1 strictly inside, 0 on the boundary, -1 strictly outside."""
    t = TAU_GEO if tau is None else tau
    x, y = float(point[0]), float(point[1])
    n = len(ring)
    inside = False
    for i in range(n):
        ax, ay = ring[i]
        bx, by = ring[(i + 1) % n]
        # on-segment test
        ux, uy = bx - ax, by - ay
        vx, vy = x - ax, y - ay
        seg2 = ux * ux + uy * uy
        if seg2 > 0:
            s = (vx * ux + vy * uy) / seg2
            if -t <= s <= 1 + t:
                px, py = ax + s * ux, ay + s * uy
                if (x - px) ** 2 + (y - py) ** 2 <= t * t * 4:
                    return 0
        if (ay > y) != (by > y):
            xi = ax + (y - ay) * (bx - ax) / (by - ay)
            if x < xi:
                inside = not inside
    return 1 if inside else -1


def segments_properly_intersect(p1, p2, q1, q2, tau=None):
    """True if the open segments cross or overlap beyond a shared endpoint."""
    t = TAU_GEO if tau is None else tau
    d1 = cross2(q2 - q1, p1 - q1)
    d2 = cross2(q2 - q1, p2 - q1)
    d3 = cross2(p2 - p1, q1 - p1)
    d4 = cross2(p2 - p1, q2 - p1)
    if ((d1 > t and d2 < -t) or (d1 < -t and d2 > t)) and \
       ((d3 > t and d4 < -t) or (d3 < -t and d4 > t)):
        return True

    def on_open_segment(a, b, c):
        if abs(cross2(b - a, c - a)) > t * max(1.0, float(np.linalg.norm(b - a))):
            return False
        s = float(np.dot(c - a, b - a)) / max(float(np.dot(b - a, b - a)), 1e-300)
        return t < s < 1 - t

    return (on_open_segment(p1, p2, q1) or on_open_segment(p1, p2, q2)
            or on_open_segment(q1, q2, p1) or on_open_segment(q1, q2, p2))


def ring_is_simple(ring, tau=None):
    n = len(ring)
    if n < 3:
        return False
    keys = [snap_key(p) for p in ring]
    if len(set(keys)) != n:
        return False
    if ring_is_convex(ring, tau) or ring_is_convex(ring[::-1], tau):
        return True
    for i in range(n):
        p1, p2 = ring[i], ring[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            q1, q2 = ring[j], ring[(j + 1) % n]
            if segments_properly_intersect(p1, p2, q1, q2, tau):
                return False
    # repeated vertices also break simplicity
    keys = [snap_key(p) for p in ring]
    return len(set(keys)) == n


def ring_is_convex(ring, tau=None):
    t = TAU_GEO if tau is None else tau
    n = len(ring)
    if n < 3:
        return False
    sign = 0
    for i in range(n):
        c = cross2(ring[(i + 1) % n] - ring[i], ring[(i + 2) % n] - ring[(i + 1) % n])
        if abs(c) <= t:
            continue
        s = 1 if c > 0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            return False
    return True


def clip_ring_halfplane(ring, normal, offset, tau=None):
    """Clip a convex ring to {x : normal . x <= offset} (Sutherland-Hodgman)."""
    t = TAU_GEO if tau is None else tau
    n = np.asarray(normal, dtype=float)
    out = []
    m = len(ring)
    for i in range(m):
        a, b = ring[i], ring[(i + 1) % m]
        da = float(np.dot(n, a)) - offset
        db = float(np.dot(n, b)) - offset
        if da <= t:
            out.append(a)
            if db > t and da < -t:
                out.append(a + (b - a) * (da / (da - db)))
        elif db < -t:
            out.append(a + (b - a) * (da / (da - db)))
    return dedupe_consecutive(np.array(out) if out else np.zeros((0, 2)), tau)


@dataclass
class Polygon2:
    """Planar polygon with optional holes.

    outer: counterclockwise ring; holes: clockwise rings, pairwise disjoint
    and strictly inside the outer ring.
    """

    outer: np.ndarray
    holes: list = field(default_factory=list)

    def __post_init__(self):
        self.outer = as_ring(self.outer)
        self.holes = [as_ring(h) for h in self.holes]

    @classmethod
    def make(cls, outer, holes=()):
        """Build with orientation normalized (outer CCW, holes CW)."""
        o = as_ring(outer)
        if ring_area(o) < 0:
            o = o[::-1]
        hs = []
        for h in holes:
            r = as_ring(h)
            if ring_area(r) > 0:
                r = r[::-1]
            hs.append(r)
        return cls(o, hs)

    def area(self):
        return ring_area(self.outer) + sum(ring_area(h) for h in self.holes)

    def contains(self, point, tau=None):
        """+1 interior, 0 boundary, -1 outside (holes count as outside)."""
        s = point_in_ring(point, self.outer, tau)
        if s <= 0:
            return s
        for h in self.holes:
            sh = point_in_ring(point, h, tau)
            if sh == 0:
                return 0
            if sh > 0:
                return -1
        return 1

    def rings(self):
        return [self.outer] + list(self.holes)

    def bbox(self):
        return (float(self.outer[:, 0].min()), float(self.outer[:, 1].min()),
                float(self.outer[:, 0].max()), float(self.outer[:, 1].max()))

    def is_valid(self, tau=None):
        if len(self.outer) < 3 or ring_area(self.outer) <= 0:
            return False
        if not ring_is_simple(self.outer, tau):
            return False
        for h in self.holes:
            if len(h) < 3 or ring_area(h) >= 0 or not ring_is_simple(h, tau):
                return False
        return True


def chain_segments(segments, tau=None):
    """Chain directed segments (a -> b) into closed rings.

    Segments must form a disjoint union of closed loops; opposite duplicate
    pairs should be cancelled before calling.  Returns a list of rings.
    """
    t = TAU_GEO if tau is None else tau
    succ = {}
    pts = {}
    for a, b in segments:
        ka, kb = snap_key(a, t), snap_key(b, t)
        if ka == kb:
            continue
        succ.setdefault(ka, []).append(kb)
        pts[ka] = np.asarray(a, dtype=float)
        pts[kb] = np.asarray(b, dtype=float)
    rings = []
    visited = set()
    for start in sorted(succ):
        if start in visited:
            continue
        ring_keys = [start]
        visited.add(start)
        cur = start
        while True:
            nxts = [k for k in succ.get(cur, []) if k not in visited or k == start]
            if not nxts:
                raise ValueError("segment chain broke: open loop")
            nxt = nxts[0]
            if nxt == start:
                break
            visited.add(nxt)
            ring_keys.append(nxt)
            cur = nxt
        rings.append(np.array([pts[k] for k in ring_keys]))
    return rings


def merge_regions(rings_list, tau=None):
    """Union of regions given as ring lists, by cancelling shared edges.

    Each element of rings_list is a ring list (outer first, holes after) of
    one region; regions must be edge-adjacent or disjoint (no partial edge
    overlaps).  Returns a list of Polygon2.
    """
    t = TAU_GEO if tau is None else tau
    count = {}
    seg_by_key = {}
    for rings in rings_list:
        for ring in rings:
            n = len(ring)
            for i in range(n):
                a, b = ring[i], ring[(i + 1) % n]
                ka, kb = snap_key(a, t), snap_key(b, t)
                if ka == kb:
                    continue
                if (kb, ka) in count:
                    count[(kb, ka)] -= 1
                    if count[(kb, ka)] == 0:
                        del count[(kb, ka)]
                        del seg_by_key[(kb, ka)]
                else:
                    count[(ka, kb)] = count.get((ka, kb), 0) + 1
                    seg_by_key[(ka, kb)] = (np.asarray(a, float), np.asarray(b, float))
    segments = [seg_by_key[k] for k in sorted(seg_by_key)]
    rings = [remove_collinear(r, t) for r in chain_segments(segments, t)]
    outers = [r for r in rings if ring_area(r) > 0]
    holes = [r for r in rings if ring_area(r) < 0]
    polys = [Polygon2(o, []) for o in outers]
    for h in holes:
        # assign to the smallest containing outer
        hosts = [p for p in polys if point_in_ring(h[0], p.outer, t) >= 0]
        if not hosts:
            raise ValueError("hole ring without containing outer ring")
        host = min(hosts, key=lambda p: ring_area(p.outer))
        host.holes.append(h)
    return polys


def chebyshev_radius(poly, tau=None):
    """Radius of the largest inscribed disk of a convex polygon (bisection)."""
    t = TAU_GEO if tau is None else tau
    ring = poly.outer if isinstance(poly, Polygon2) else as_ring(poly)
    if len(ring) < 3 or abs(ring_area(ring)) <= t:
        raise DegenerateRegion("zero-area region has no inscribed disk")
    if ring_area(ring) < 0:
        ring = ring[::-1]
    # inward-offset feasibility: shrink every edge half-plane by r
    edges = []
    n = len(ring)
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        e = b - a
        ln = float(np.linalg.norm(e))
        if ln <= t:
            continue
        nrm = np.array([e[1], -e[0]]) / ln  # outward for CCW ring
        edges.append((nrm, float(np.dot(nrm, a))))

    def feasible(r):
        region = ring
        for nrm, off in edges:
            region = clip_ring_halfplane(region, nrm, off - r, tau=1e-15)
            if len(region) == 0:
                return False
        return True

    xmin, ymin = ring.min(axis=0)
    xmax, ymax = ring.max(axis=0)
    lo, hi = 0.0, 0.5 * max(xmax - xmin, ymax - ymin)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    if lo <= t:
        raise DegenerateRegion("inscribed radius not strictly positive")
    return lo


def convex_hull_2d(points, tau=None):
    """Monotone-chain convex hull, counterclockwise, no collinear vertices."""
    t = TAU_GEO if tau is None else tau
    pts = sorted({snap_key(p, t): (float(p[0]), float(p[1])) for p in points}.values())
    if len(pts) < 3:
        return np.array(pts, dtype=float).reshape(-1, 2)
    pts = [np.array(p) for p in pts]

    def build(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross2(out[-1] - out[-2], p - out[-2]) <= t:
                out.pop()
            out.append(p)
        return out

    lower = build(pts)
    upper = build(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])
