"""2D line arrangements clipped to a bounding box, with point location.

Cells are built by successive convex splitting, so every bounded region is
convex by construction.  Cells that touch the clip box stand in for the
unbounded regions of the ideal arrangement and can be filtered out.
"""

from dataclasses import dataclass

import numpy as np

from .base import TAU_GEO, snap, snap_key, unit
from .polygon import (Polygon2, chebyshev_radius, clip_ring_halfplane,
                      point_in_ring, ring_area)


@dataclass(frozen=True)
class Line2:
    """Line {p : normal . p = offset} with unit normal."""

    normal: tuple
    offset: float

    @classmethod
    def from_point_direction(cls, point, direction):
        d = unit(np.asarray(direction, dtype=float))
        n = (-d[1], d[0])
        return cls((float(n[0]), float(n[1])), float(n[0] * point[0] + n[1] * point[1]))

    @classmethod
    def from_points(cls, a, b):
        return cls.from_point_direction(a, np.asarray(b, float) - np.asarray(a, float))

    def eval(self, p):
        return self.normal[0] * p[0] + self.normal[1] * p[1] - self.offset

    def carrier_key(self, tau=None):
        t = TAU_GEO if tau is None else tau
        nx, ny = self.normal
        d = self.offset
        if nx < -1e-12 or (abs(nx) <= 1e-12 and ny < 0):
            nx, ny, d = -nx, -ny, -d
        return (snap(nx, 1e-9), snap(ny, 1e-9), snap(d, t))


@dataclass
class Arrangement2:
    lines: list
    regions: list          # list of Polygon2, all convex
    bbox: tuple            # (xmin, ymin, xmax, ymax)
    on_boundary: list      # region indices touching the bbox frame

    def locate(self, point, tau=None):
        """Index of the region containing point, or None (e.g. exactly on a line)."""
        for i, reg in enumerate(self.regions):
            if point_in_ring(point, reg.outer, tau) > 0:
                return i
        for i, reg in enumerate(self.regions):
            if point_in_ring(point, reg.outer, tau) == 0:
                return i
        return None

    def bounded_regions(self):
        """Regions not touching the clip box (finite in the ideal arrangement)."""
        skip = set(self.on_boundary)
        return [r for i, r in enumerate(self.regions) if i not in skip]

    def adjacency(self, tau=None):
        """Pairs (i, j) of regions sharing an edge segment."""
        t = TAU_GEO if tau is None else tau
        edge_owner = {}
        pairs = set()
        for i, reg in enumerate(self.regions):
            ring = reg.outer
            n = len(ring)
            for k in range(n):
                a, b = snap_key(ring[k], t), snap_key(ring[(k + 1) % n], t)
                key = (min(a, b), max(a, b))
                if key in edge_owner and edge_owner[key] != i:
                    pairs.add((min(edge_owner[key], i), max(edge_owner[key], i)))
                edge_owner[key] = i
        return sorted(pairs)


def build_arrangement(lines, bbox, tau=None):
    """Split bbox by every line; returns the Arrangement2 of convex cells."""
    t = TAU_GEO if tau is None else tau
    xmin, ymin, xmax, ymax = (float(v) for v in bbox)
    frame = np.array([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]])
    distinct = {}
    for ln in lines:
        distinct.setdefault(ln.carrier_key(t), ln)
    lines = [distinct[k] for k in sorted(distinct)]
    cells = [frame]
    for ln in lines:
        n = np.asarray(ln.normal, dtype=float)
        d = ln.offset
        nxt = []
        for cell in cells:
            lo = clip_ring_halfplane(cell, n, d, t)
            hi = clip_ring_halfplane(cell, -n, -d, t)
            for part in (lo, hi):
                if len(part) >= 3 and abs(ring_area(part)) > t:
                    nxt.append(part)
        cells = nxt
    regions = [Polygon2(c if ring_area(c) > 0 else c[::-1]) for c in cells]
    on_boundary = []
    for i, reg in enumerate(regions):
        ring = reg.outer
        for p in ring:
            if (abs(p[0] - xmin) <= 10 * t or abs(p[0] - xmax) <= 10 * t
                    or abs(p[1] - ymin) <= 10 * t or abs(p[1] - ymax) <= 10 * t):
                on_boundary.append(i)
                break
    return Arrangement2(lines, regions, (xmin, ymin, xmax, ymax), on_boundary)


def inscribed_radius(region, tau=None):
    """Largest inscribed disk radius of a convex region (Chebyshev radius)."""
    return chebyshev_radius(region, tau)
