"""Planes and half-spaces in signed-distance form n.x = d."""

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import SplitSides
from .base import TAU_GEO, TAU_UNIT, cross3, snap, unit


@dataclass(frozen=True)
class Plane3:
    """Oriented plane {x : normal . x = offset} with unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        if abs(float(np.linalg.norm(n)) - 1.0) > 1e-7:
            n = unit(n)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))
        assert abs(float(np.linalg.norm(self.normal)) - 1.0) <= max(TAU_UNIT, 1e-12)

    @classmethod
    def from_point_normal(cls, point, normal):
        n = unit(normal)
        return cls(n, float(np.dot(n, point)))

    def signed_distance(self, point):
        return float(np.dot(self.normal, point) - self.offset)

    def contains(self, point, tau=None):
        t = TAU_GEO if tau is None else tau
        return abs(self.signed_distance(point)) <= t

    def flipped(self):
        return Plane3(-self.normal, -self.offset)

    def carrier_key(self, tau=None):
        """Orientation-free key: two planes with the same point set share it."""
        t = TAU_GEO if tau is None else tau
        n, d = self.normal, self.offset
        for c in n:
            if abs(c) > 1e-12:
                if c < 0:
                    n, d = -n, -d
                break
        return (snap(n[0], 1e-9), snap(n[1], 1e-9), snap(n[2], 1e-9), snap(d, t))

    def oriented_key(self, tau=None):
        t = TAU_GEO if tau is None else tau
        n, d = self.normal, self.offset
        return (snap(n[0], 1e-9), snap(n[1], 1e-9), snap(n[2], 1e-9), snap(d, t))

    def same_carrier(self, other, tau=None):
        t = TAU_GEO if tau is None else tau
        dot = float(np.dot(self.normal, other.normal))
        if dot > 0:
            return bool(np.allclose(self.normal, other.normal, atol=1e-7)
                        and abs(self.offset - other.offset) <= t)
        return bool(np.allclose(self.normal, -other.normal, atol=1e-7)
                    and abs(self.offset + other.offset) <= t)

    def frame(self):
        """Orthonormal in-plane axes (ex, ey) with ex x ey = normal."""
        n = self.normal
        a = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
        ex = unit(cross3(a, n))
        ey = cross3(n, ex)
        return ex, ey

    def origin(self):
        return self.normal * self.offset


@dataclass(frozen=True)
class HalfSpace3:
    """Closed half-space bounded by `boundary`.

    side +1 keeps n.x <= d, side -1 keeps n.x >= d.  `degenerate` marks the
    all-points-on-plane case; reconstruction callers treat it as an error.
    """

    boundary: Plane3
    side: int
    degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.side not in (+1, -1):
            raise ValueError("side must be +1 or -1")

    def contains(self, point, tau=None):
        t = TAU_GEO if tau is None else tau
        return self.side * self.boundary.signed_distance(point) <= t

    def outward_normal(self):
        """Normal pointing out of the kept region."""
        return self.boundary.normal * self.side

    def as_leq(self):
        """Rewrite as (n, d) with kept region {x : n.x <= d}."""
        n = self.boundary.normal * self.side
        d = self.boundary.offset * self.side
        return n, d


def side_containing(plane, points, tau=None):
    """Closed half-space of `plane` containing all `points`.

    Points on the plane (within tau) constrain neither side.  If every point
    is on the plane the +1 side is returned with the degenerate flag set.
    Raises SplitSides when points lie strictly on both sides.
    """
    t = TAU_GEO if tau is None else tau
    if len(points) == 0:
        raise ValueError("side_containing needs at least one point")
    has_pos = has_neg = False
    for p in points:
        d = plane.signed_distance(p)
        if d > t:
            has_pos = True
        elif d < -t:
            has_neg = True
    if has_pos and has_neg:
        raise SplitSides(
            f"points lie strictly on both sides of plane n={plane.normal} d={plane.offset}")
    if has_pos:
        return HalfSpace3(plane, -1)
    if has_neg:
        return HalfSpace3(plane, +1)
    return HalfSpace3(plane, +1, degenerate=True)


def plane_plane_line(p, q, tau=None):
    """Intersection line of two planes as (point, direction), or None if parallel."""
    t = TAU_GEO if tau is None else tau
    d = cross3(p.normal, q.normal)
    n = float(np.linalg.norm(d))
    if n < 1e-9:
        return None
    d = d / n
    # Solve for a point on both planes in the span of the two normals.
    a = np.array([p.normal, q.normal, d])
    b = np.array([p.offset, q.offset, 0.0])
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        return None
    return x, d
