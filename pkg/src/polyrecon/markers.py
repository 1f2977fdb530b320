"""Markers, their metadata and the markup description.

A marker is a position plus one of three data kinds: bare point, point-plane
(the plane it lies in) or point-normal (outward unit normal).  Metadata is a
single optional-field record; each reconstruction engine states which fields
it requires.  `in_plane_orientation` is carried for completeness but consumed
by no algorithm.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import MissingKey
from .geom import Plane3, TAU_GEO, unit
from .geom.base import AXES3, TAU_AXIS

POINT = "point"
POINT_PLANE = "point-plane"
POINT_NORMAL = "point-normal"


@dataclass(frozen=True)
class MarkerMeta:
    face_id: int | None = None
    polyhedron_id: int | None = None
    elaboration_id: int | None = None
    base_face_ref: tuple | None = None   # (owner id, face_id); owner is a
                                         # polyhedron id or an elaboration id
    order_index: int | None = None
    in_plane_orientation: float | None = None

    def merged(self, **kw):
        return replace(self, **kw)


EMPTY_META = MarkerMeta()


@dataclass(frozen=True)
class Marker:
    position: np.ndarray
    plane: Plane3 | None = None
    normal: np.ndarray | None = None
    meta: MarkerMeta = EMPTY_META

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        if self.normal is not None:
            object.__setattr__(self, "normal", unit(self.normal))

    @property
    def kind(self):
        if self.normal is not None:
            return POINT_NORMAL
        if self.plane is not None:
            return POINT_PLANE
        return POINT

    def carrier_plane(self):
        """The plane this marker lies in, derived from either data kind."""
        if self.plane is not None:
            return self.plane
        if self.normal is not None:
            return Plane3.from_point_normal(self.position, self.normal)
        return None


@dataclass
class MarkupDescription:
    """Set of markers with metadata; the sole input to every engine."""

    markers: dict  # MarkerId -> Marker

    @classmethod
    def from_list(cls, markers):
        return cls({i: m for i, m in enumerate(markers)})

    def __len__(self):
        return len(self.markers)

    def ids(self):
        return sorted(self.markers)

    def values(self):
        return [self.markers[i] for i in self.ids()]

    def items(self):
        return [(i, self.markers[i]) for i in self.ids()]

    def subset(self, ids):
        return MarkupDescription({i: self.markers[i] for i in ids})

    def with_meta(self, **kw):
        """Copy with the given meta fields stamped onto every marker."""
        return MarkupDescription({
            i: replace(m, meta=m.meta.merged(**kw)) for i, m in self.markers.items()})


@dataclass(frozen=True)
class Diagnostic:
    code: str
    marker_id: int | None
    detail: str = ""

    def __str__(self):
        where = f" (marker {self.marker_id})" if self.marker_id is not None else ""
        return f"{self.code}{where}: {self.detail}"


def validate(d, tau=None):
    """Invariant diagnostics; empty list iff the description is well formed."""
    t = TAU_GEO if tau is None else tau
    out = []
    order_groups = {}
    for mid, m in d.items():
        if not np.all(np.isfinite(m.position)):
            out.append(Diagnostic("NonFinite", mid, "position has NaN/inf"))
        if m.plane is not None and m.normal is not None:
            out.append(Diagnostic("ConflictingData", mid, "both plane and normal set"))
        if m.plane is not None and abs(m.plane.signed_distance(m.position)) > t:
            out.append(Diagnostic(
                "OffPlane", mid,
                f"position is {m.plane.signed_distance(m.position):.3g} off its plane"))
        if m.meta.base_face_ref is not None and m.meta.elaboration_id is None:
            out.append(Diagnostic("DanglingBaseFaceRef", mid,
                                  "base_face_ref without elaboration_id"))
        if m.meta.order_index is not None:
            key = (m.meta.polyhedron_id, m.meta.elaboration_id, m.meta.face_id)
            order_groups.setdefault(key, []).append((mid, m.meta.order_index))
    for key, entries in order_groups.items():
        seen = {}
        for mid, idx in entries:
            if idx in seen:
                out.append(Diagnostic("DuplicateOrder", mid,
                                      f"order_index {idx} repeats in group {key}"))
            seen[idx] = mid
    return out


def _snap_direction(v, tau_snap):
    best = None
    for axis in AXES3:
        for sgn in (1.0, -1.0):
            c = float(np.dot(v, axis * sgn))
            ang = math.acos(min(1.0, max(-1.0, c)))
            if ang <= tau_snap and (best is None or ang < best[0]):
                best = (ang, axis * sgn)
    return None if best is None else best[1]


def normalize(d, snap_axis=False, merge_coplanar=False, tau_snap=math.radians(3.0)):
    """Optional input normalization: axis snapping and coplanar-group merging.

    snap_axis: planes/normals within tau_snap of a coordinate direction become
    exactly axis-aligned.  merge_coplanar: markers sharing a face_id whose
    planes agree within tau_snap are replaced by their (unweighted) average
    plane.  Positions are re-projected onto adjusted planes.  Identity when
    both options are off; idempotent.
    """
    markers = dict(d.markers)
    if snap_axis:
        for mid, m in list(markers.items()):
            if m.normal is not None:
                snapped = _snap_direction(m.normal, tau_snap)
                if snapped is not None:
                    markers[mid] = Marker(m.position, None, snapped, m.meta)
            elif m.plane is not None:
                snapped = _snap_direction(m.plane.normal, tau_snap)
                if snapped is not None:
                    offset = float(np.dot(snapped, m.position))
                    plane = Plane3(snapped, offset)
                    markers[mid] = Marker(m.position, plane, None, m.meta)
    if merge_coplanar:
        groups = {}
        for mid, m in markers.items():
            if m.plane is not None and m.meta.face_id is not None:
                groups.setdefault(m.meta.face_id, []).append(mid)
        for fid, mids in groups.items():
            distinct = {}
            for mid in mids:
                distinct.setdefault(markers[mid].plane.oriented_key(), markers[mid].plane)
            planes = list(distinct.values())
            if len(planes) < 2:
                continue
            ref = planes[0]
            if any(math.acos(min(1.0, abs(float(np.dot(ref.normal, p.normal))))) > tau_snap
                   for p in planes[1:]):
                continue
            n = unit(sum((p.normal if np.dot(p.normal, ref.normal) > 0 else -p.normal)
                         for p in planes))
            off = float(np.mean([p.offset if np.dot(p.normal, ref.normal) > 0 else -p.offset
                                 for p in planes]))
            avg = Plane3(n, off)
            for mid in mids:
                m = markers[mid]
                pos = m.position - avg.signed_distance(m.position) * avg.normal
                markers[mid] = Marker(pos, avg, None, m.meta)
    out = MarkupDescription(markers)
    return out


def group_by(d, key):
    """Partition marker ids by a metadata key: 'face', 'polyhedron' or 'elaboration'."""
    attr = {"face": "face_id", "polyhedron": "polyhedron_id",
            "elaboration": "elaboration_id"}[key]
    groups = {}
    for mid, m in d.items():
        value = getattr(m.meta, attr)
        if value is None:
            raise MissingKey(mid, attr)
        groups.setdefault(value, []).append(mid)
    return {k: sorted(v) for k, v in groups.items()}
