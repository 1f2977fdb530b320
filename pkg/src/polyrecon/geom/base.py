"""Tolerances, coordinate snapping and small vector helpers.

All geometry in this package runs on float64 world coordinates (meters).
Comparisons go through TAU_GEO so that canonical forms built from snapped
coordinates compare exactly.
"""

import math
import os

import numpy as np

# Coplanarity / point-on-plane tolerance; RECON_TOLERANCE overrides it.
TAU_GEO = float(os.environ.get("RECON_TOLERANCE", "1e-9"))
# Unit-normal tolerance.
TAU_UNIT = 1e-12
# Axis snapping tolerance, radians.
TAU_AXIS = 1e-6


def snap(value, tau=None):
    """Round a scalar to the tau grid."""
    t = TAU_GEO if tau is None else tau
    return round(value / t) * t


def snap_key(point, tau=None):
    """Hashable grid key for a 2D/3D point."""
    t = TAU_GEO if tau is None else tau
    if len(point) == 3:
        return (int(round(float(point[0]) / t)), int(round(float(point[1]) / t)),
                int(round(float(point[2]) / t)))
    if len(point) == 2:
        return (int(round(float(point[0]) / t)), int(round(float(point[1]) / t)))
    return tuple(int(round(float(c) / t)) for c in point)


def snap_keys(arr, tau=None):
    """Vectorized snap_key for an (n, d) array; returns a list of tuples."""
    t = TAU_GEO if tau is None else tau
    ints = np.rint(np.asarray(arr, dtype=float) / t).astype(np.int64)
    return [tuple(row) for row in ints.tolist()]


def vec(*coords):
    return np.asarray(coords, dtype=float)


def norm(v):
    return float(np.linalg.norm(v))


def unit(v):
    n = norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return np.asarray(v, dtype=float) / n


def is_finite(v):
    return bool(np.all(np.isfinite(v)))


def cross2(a, b):
    return float(a[0] * b[1] - a[1] * b[0])


def cross3(a, b):
    """np.cross without its axis-juggling overhead, single 3-vectors."""
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def cross3_rows(a, b):
    """Row-wise cross product of (n, 3) arrays."""
    return np.stack([a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1],
                     a[:, 2] * b[:, 0] - a[:, 0] * b[:, 2],
                     a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]], axis=1)


def angle_to_axis(v):
    """Smallest angle (radians) between v and any coordinate axis."""
    u = unit(v)
    c = min(1.0, max(abs(float(x)) for x in u))
    return math.acos(c)


def dominant_axis(v):
    """Index of the coordinate axis closest to v's direction."""
    return int(np.argmax(np.abs(v)))


AXES3 = (vec(1.0, 0.0, 0.0), vec(0.0, 1.0, 0.0), vec(0.0, 0.0, 1.0))
