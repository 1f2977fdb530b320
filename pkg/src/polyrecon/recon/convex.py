"""Reconstruction of convex polyhedra from marker-per-face markup.

For point-plane markers the half-space of each marker plane is inferred from
the side containing all other markers; point-normal markers fix their
half-space directly.  The intersection of the inferred half-spaces is the
unique convex polyhedron whose faces carry the markers.
"""

import warnings

import numpy as np

from ..errors import (Degenerate, MissingKey, RedundantPlane,
                      RedundantPlaneWarning, SplitSides)
from ..geom import (HalfSpace3, Scene, TAU_GEO, intersect_halfspaces,
                    redundant_sources, side_containing)
from ..markers import POINT_NORMAL, POINT_PLANE, group_by


def _distinct_carrier_planes(markup, tau):
    planes = {}
    for mid, m in markup.items():
        p = m.carrier_plane()
        if p is None:
            raise MissingKey(mid, "plane or normal")
        planes.setdefault(p.carrier_key(tau), []).append((mid, m))
    return planes


def reconstruct_convex(markup, strict=False, tau=None):
    """The unique convex polyhedron consistent with a point-plane/point-normal
    marker-per-face markup.

    Raises SplitSides on non-convex input, Unbounded/Empty when the planes do
    not close a volume.  Marker planes supporting no face raise
    RedundantPlane in strict mode and warn otherwise.
    """
    t = TAU_GEO if tau is None else tau
    groups = _distinct_carrier_planes(markup, t)
    if len(groups) < 4:
        raise Degenerate(f"need >= 4 distinct marker planes, got {len(groups)}")
    positions = [m.position for m in markup.values()]
    halfspaces = []
    for key in sorted(groups):
        members = groups[key]
        normals = [m.normal for _, m in members if m.kind == POINT_NORMAL]
        plane = members[0][1].carrier_plane()
        if normals:
            # outward normal given: solid is on the other side
            hs = HalfSpace3(plane, +1 if np.dot(normals[0], plane.normal) > 0 else -1)
        else:
            others = [p for p in positions
                      if abs(plane.signed_distance(p)) > t]
            if not others:
                raise Degenerate("all markers coplanar")
            hs = side_containing(plane, others, t)
            if hs.degenerate:
                raise Degenerate("marker plane constrains no side")
        halfspaces.append(hs)
    poly = intersect_halfspaces(halfspaces, tau=t)
    unused = redundant_sources(poly, len(halfspaces))
    if unused:
        msg = f"{len(unused)} marker plane(s) support no face of the hull"
        if strict:
            raise RedundantPlane(msg)
        warnings.warn(msg, RedundantPlaneWarning)
    # every marker must end up on the boundary
    stray = []
    for mid, m in markup.items():
        if not any(f.contains_point(m.position, 100 * t) for f in poly.faces):
            stray.append(mid)
    if stray:
        msg = f"markers {stray} do not lie on the reconstructed boundary"
        if strict:
            raise RedundantPlane(msg)
        warnings.warn(msg, RedundantPlaneWarning)
    return poly


def reconstruct_convex_multi(markup, strict=False, tau=None):
    """One convex polyhedron per polyhedron_id group (Theorem on multiple
    convex polyhedra with polyhedron IDs)."""
    t = TAU_GEO if tau is None else tau
    groups = group_by(markup, "polyhedron")
    polys = []
    for gid in sorted(groups):
        try:
            polys.append(reconstruct_convex(markup.subset(groups[gid]), strict, t))
        except (SplitSides, Degenerate) as exc:
            exc.polyhedron_id = gid
            raise
    return Scene(polys)
