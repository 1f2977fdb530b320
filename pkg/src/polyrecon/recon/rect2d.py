"""Unique reconstruction of disjoint axis-aligned rectangle sets from
marker-per-edge point-normal data.

Markers split into four classes by outward normal (left, right, top,
bottom).  The engine repeatedly finds the one rectangle consistent with the
left-most (then top-most) left-class marker that has aligned markers on all
four edges and no marker in its interior, removes its markers, and recurses.

All comparisons run on tau-grid integer buckets so that the strict
left-of/above relations the algorithm depends on are exact; output
coordinates are restored from representative input values.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import MarkerAtCorner, NoConsistentSeed
from ..geom import TAU_GEO
from ..geom.base import TAU_AXIS

L, R, T, B = "L", "R", "T", "B"
_CLASS_OF_AXIS = {(0, -1): L, (0, +1): R, (1, +1): T, (1, -1): B}


@dataclass(frozen=True)
class Marker2N:
    """2D point-normal marker with an axis-aligned normal class."""

    position: tuple
    normal_class: str

    @property
    def x(self):
        return self.position[0]

    @property
    def y(self):
        return self.position[1]


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle [x0, x1] x [y0, y1]."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError("rectangle needs positive extent")

    def as_tuple(self):
        return (self.x0, self.y0, self.x1, self.y1)

    def disjoint_from(self, other, closed=True):
        if closed:
            return (self.x1 < other.x0 or other.x1 < self.x0
                    or self.y1 < other.y0 or other.y1 < self.y0)
        return (self.x1 <= other.x0 or other.x1 <= self.x0
                or self.y1 <= other.y0 or other.y1 <= self.y0)


@dataclass
class RectSet:
    rectangles: list

    def as_tuples(self):
        return sorted(r.as_tuple() for r in self.rectangles)


class _IMarker:
    __slots__ = ("ix", "iy", "cls")

    def __init__(self, ix, iy, cls):
        self.ix, self.iy, self.cls = ix, iy, cls


class _Grid:
    """Marker set in integer bucket space plus coordinate restoration."""

    def __init__(self, markers, tau):
        self.tau = tau
        self.restore_x = {}
        self.restore_y = {}
        self.markers = []
        for m in markers:
            ix = int(round(m.x / tau))
            iy = int(round(m.y / tau))
            self.restore_x.setdefault(ix, float(m.x))
            self.restore_y.setdefault(iy, float(m.y))
            self.markers.append(_IMarker(ix, iy, m.normal_class))

    def rect(self, ix0, iy0, ix1, iy1):
        return Rect(self.restore_x[ix0], self.restore_y[iy0],
                    self.restore_x[ix1], self.restore_y[iy1])


class _IRect:
    __slots__ = ("x0", "y0", "x1", "y1")

    def __init__(self, x0, y0, x1, y1):
        if not (x0 < x1 and y0 < y1):
            raise ValueError("degenerate")
        self.x0, self.y0, self.x1, self.y1 = x0, y0, x1, y1

    def key(self):
        return (self.x0, self.y0, self.x1, self.y1)

    def disjoint_from(self, other, closed=True):
        if closed:
            return (self.x1 < other.x0 or other.x1 < self.x0
                    or self.y1 < other.y0 or other.y1 < self.y0)
        return (self.x1 <= other.x0 or other.x1 <= self.x0
                or self.y1 <= other.y0 or other.y1 <= self.y0)


def classify_normal_2d(normal, tau_axis=None):
    """Normal class of an axis-aligned 2D normal, or None if off-axis."""
    ta = TAU_AXIS if tau_axis is None else tau_axis
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    for (axis, sgn), cls in _CLASS_OF_AXIS.items():
        e = np.zeros(2)
        e[axis] = sgn
        if float(np.dot(n, e)) >= np.cos(ta):
            return cls
    return None


def bounding_rect(markers):
    """Smallest axis-aligned rectangle containing all marker positions.

    Returns (x0, y0, x1, y1, degenerate_flag); zero extent is allowed but
    flagged.
    """
    if not markers:
        raise ValueError("bounding_rect needs markers")
    xs = [m.x for m in markers]
    ys = [m.y for m in markers]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    return (x0, y0, x1, y1, x0 == x1 or y0 == y1)


def _on_rect(m, r):
    """'consistent': on an edge of r and aligned with it; corner raises."""
    if m.ix in (r.x0, r.x1) and m.iy in (r.y0, r.y1):
        raise MarkerAtCorner(f"marker at corner ({m.ix},{m.iy})")
    if m.cls == L:
        return m.ix == r.x0 and r.y0 < m.iy < r.y1
    if m.cls == R:
        return m.ix == r.x1 and r.y0 < m.iy < r.y1
    if m.cls == T:
        return m.iy == r.y1 and r.x0 < m.ix < r.x1
    return m.iy == r.y0 and r.x0 < m.ix < r.x1


def _interior_to(m, r):
    """'in the interior': strictly inside, or on an edge but not aligned."""
    if r.x0 < m.ix < r.x1 and r.y0 < m.iy < r.y1:
        return True
    on_boundary = ((m.ix in (r.x0, r.x1) and r.y0 <= m.iy <= r.y1)
                   or (m.iy in (r.y0, r.y1) and r.x0 <= m.ix <= r.x1))
    return on_boundary and not _on_rect(m, r)


def _fully_marked(r, markers):
    got = {L: False, R: False, T: False, B: False}
    for m in markers:
        if _on_rect(m, r):
            got[m.cls] = True
    return all(got.values())


def _verify(r, markers):
    try:
        if not _fully_marked(r, markers):
            return False
        return not any(_interior_to(m, r) for m in markers)
    except MarkerAtCorner:
        # a corner marker can never be consistent with this candidate
        return False


def _find_seed(markers):
    lefts = [m for m in markers if m.cls == L]
    if not lefts:
        raise NoConsistentSeed("no left-class markers", unconsumed=len(markers))
    ml = min(lefts, key=lambda m: (m.ix, -m.iy))

    tops = sorted((m for m in markers if m.cls == T and m.ix > ml.ix and m.iy > ml.iy),
                  key=lambda m: (m.ix, -m.iy))
    s_set = [m for m in markers if m.cls == B and m.ix > ml.ix and m.iy < ml.iy]
    s_m = [m for m in s_set
           if not any(o.iy > m.iy and o.ix <= m.ix for o in s_set if o is not m)]
    s_m.sort(key=lambda m: (m.ix, -m.iy))

    for mt in tops:
        for mb in s_m:
            strip = [m for m in markers if m.cls == R and m.ix > ml.ix
                     and mb.iy < m.iy < mt.iy]
            if not strip:
                continue
            mr = min(strip, key=lambda m: m.ix)
            try:
                rect = _IRect(ml.ix, mb.iy, mr.ix, mt.iy)
            except ValueError:
                continue
            if not (rect.y0 < ml.iy < rect.y1 and rect.x0 < mt.ix < rect.x1
                    and rect.x0 < mb.ix < rect.x1):
                continue
            if _verify(rect, markers):
                return rect
    raise NoConsistentSeed(
        f"no rectangle closes around left-most marker (bucket {ml.ix},{ml.iy})",
        unconsumed=len(markers))


def find_seed_rectangle(markers, tau=None):
    """The unique rectangle consistent with the left-most (then top-most)
    left-class marker: aligned markers on all four edges, none interior."""
    t = TAU_GEO if tau is None else tau
    grid = _Grid(markers, t)
    r = _find_seed(grid.markers)
    return grid.rect(r.x0, r.y0, r.x1, r.y1)


def reconstruct_rects(markers, allow_shared_boundary=False, tau=None):
    """The unique rectangle set fully consistent with the markers.

    Peels one seed rectangle at a time; each iteration strictly decreases
    the unconsumed marker count.  Raises NoConsistentSeed (with the count of
    unconsumed markers) when the markup violates the engine preconditions,
    including non-axis-aligned normals.
    """
    t = TAU_GEO if tau is None else tau
    for m in markers:
        if m.normal_class not in (L, R, T, B):
            raise NoConsistentSeed("markers must carry axis-aligned normals",
                                   unconsumed=len(markers))
    grid = _Grid(markers, t)
    remaining = list(grid.markers)
    irects = []
    while remaining:
        seed = _find_seed(remaining)
        for other in irects:
            if not seed.disjoint_from(other, closed=not allow_shared_boundary):
                raise NoConsistentSeed(
                    f"seed {seed.key()} collides with {other.key()}",
                    unconsumed=len(remaining))
        consumed = [m for m in remaining if _on_rect(m, seed)]
        if not consumed:
            raise NoConsistentSeed("seed rectangle consumed no markers",
                                   unconsumed=len(remaining))
        remaining = [m for m in remaining if m not in consumed]
        irects.append(seed)
    return RectSet([grid.rect(*r.key()) for r in irects])


def check_full_consistency(rects, markers, tau=None):
    """True iff every marker lies aligned on an edge and every edge is marked."""
    t = TAU_GEO if tau is None else tau
    grid = _Grid(markers, t)
    rs = rects.rectangles if isinstance(rects, RectSet) else list(rects)
    irects = []
    for r in rs:
        irects.append(_IRect(int(round(r.x0 / t)), int(round(r.y0 / t)),
                             int(round(r.x1 / t)), int(round(r.y1 / t))))
    try:
        for m in grid.markers:
            if not any(_on_rect(m, r) for r in irects):
                return False
            if any(_interior_to(m, r) for r in irects):
                return False
        for r in irects:
            if not _fully_marked(r, grid.markers):
                return False
    except MarkerAtCorner:
        return False
    return True
