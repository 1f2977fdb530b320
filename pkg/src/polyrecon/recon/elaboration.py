"""Hierarchical elaboration: building solids by extruding/intruding face
profiles, and the reconstruction engines that invert the process from
markers.

The forward direction (apply_elaborations) is the test generator: an
ElaborationTree of convex bases plus profile/depth nodes becomes a Scene,
with every face tagged with the ids a placement strategy needs to stamp.
The engines reconstruct bases via the convex engine, then recover each
elaboration's profile from markers perpendicular to its base face and its
depth from markers parallel to it; no parallel markers means the intrusion
tunnels all the way through.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import (Degenerate, DepthExceedsSolid, FaceIdentificationFailed,
                      InconsistentDepth, InvalidMarkup, MissingKey,
                      NoConsistentSeed, NoEmptyClass, NonPerpendicularMarker,
                      OrderCycleBroken, ProfileNotInterior, SplitSides)
from ..geom import (Face3, Polygon2, Polyhedron, Scene, TAU_GEO,
                    point_in_ring, ring_area, ring_is_simple)
from ..geom.base import TAU_AXIS, cross2
from ..geom.polygon import (clip_ring_halfplane, dedupe_consecutive,
                            segments_properly_intersect)
from .convex import reconstruct_convex
from .rect2d import Marker2N, classify_normal_2d, reconstruct_rects

EXTRUSION = "extrusion"
INTRUSION = "intrusion"
THROUGH = object()  # sentinel depth: intrusion tunnelling all the way through


@dataclass
class Elaboration:
    elaboration_id: int
    kind: str                    # EXTRUSION | INTRUSION
    base_face_id: int
    profile: np.ndarray          # CCW ring in the base face's frame
    depth: object = None         # positive float, or THROUGH for intrusions

    def is_through(self):
        return self.depth is THROUGH


@dataclass
class ElaborationTree:
    """Convex base polyhedra plus elaboration nodes referencing face ids.

    Base faces are tagged with polyhedron_id and consecutive face ids when
    the tree is built; nodes may reference faces created by earlier nodes
    (caps and side walls get fresh ids as they appear).
    """

    bases: list                  # (polyhedron_id, Polyhedron)
    nodes: list = field(default_factory=list)


def _tag_base(poly, pid, start_fid):
    faces = []
    fid = start_fid
    for f in poly.faces:
        faces.append(Face3(f.plane, f.origin, f.ex, f.ey, f.polygon,
                           {"polyhedron_id": pid, "face_id": fid}))
        fid += 1
    return faces, fid


def _profile_clear_of_face(face, ring2, tau):
    """Profile ring must be strictly inside the face, clear of its holes."""
    for p in ring2:
        if face.polygon.contains(p, tau) != 1:
            return False
    rings = face.polygon.rings()
    n = len(ring2)
    for i in range(n):
        a, b = ring2[i], ring2[(i + 1) % n]
        for r in rings:
            m = len(r)
            for j in range(m):
                if segments_properly_intersect(a, b, r[j], r[(j + 1) % m], tau):
                    return False
    for h in face.polygon.holes:
        if point_in_ring(h[0], ring2, tau) >= 0:
            return False
    return True


def _punch_hole(face, ring2):
    """Same face with the CCW profile ring added as a hole."""
    poly = Polygon2.make(face.polygon.outer, list(face.polygon.holes) + [ring2[::-1]])
    return Face3(face.plane, face.origin, face.ex, face.ey, poly, dict(face.tag))


def _side_tag(base_tag, eid, fid, order_index):
    return {"polyhedron_id": base_tag.get("polyhedron_id"),
            "face_id": fid, "elaboration_id": eid,
            "base_face_ref": (base_tag.get("elaboration_id")
                              if base_tag.get("elaboration_id") is not None
                              else base_tag.get("polyhedron_id"),
                              base_tag["face_id"]),
            "role": "side", "order_index": order_index}


def _cap_tag(base_tag, eid, fid):
    t = _side_tag(base_tag, eid, fid, None)
    t["role"] = "cap"
    del t["order_index"]
    return t


def _wall_faces(top_ring, bottom_ring, base_face, eid, next_fid):
    """Quad walls between the profile ring and its displaced copy.

    The [a, b, b', a'] vertex pattern orients outward for extrusions and
    into the pocket for intrusions automatically, because the displacement
    direction flips the Newell normal.
    """
    n = len(top_ring)
    walls = []
    for i in range(n):
        a, b = top_ring[i], top_ring[(i + 1) % n]
        a2, b2 = bottom_ring[i], bottom_ring[(i + 1) % n]
        ring = np.array([a, b, b2, a2])
        order = (n - i) % n  # clockwise around the profile seen from outside
        walls.append(Face3.from_rings3d(
            [ring], tag=_side_tag(base_face.tag, eid, next_fid + i, order)))
    return walls


def _cast_thickness(faces, src_idx, points3, n, tau):
    """For each point, distance along -n to the first face hit from inside.

    Returns (ts, exit_face_indices).  A hit counts only if the ray pierces
    the face's polygon.
    """
    ts = []
    hits = []
    for p in points3:
        best = None
        for j, g in enumerate(faces):
            if j == src_idx:
                continue
            denom = float(np.dot(g.plane.normal, n))
            if denom >= -1e-12:
                continue  # ray along -n can only exit where n_g . n < 0
            t_hit = g.plane.signed_distance(p) / denom
            if t_hit <= tau:
                continue
            q = p - t_hit * n
            if g.polygon.contains(g.to_frame(q), tau) >= 0:
                if best is None or t_hit < best[0]:
                    best = (t_hit, j)
        if best is None:
            raise DepthExceedsSolid("no face closes the solid under the profile")
        ts.append(best[0])
        hits.append(best[1])
    return ts, hits


def apply_elaboration(faces, elab, next_fid, tau=None):
    """Apply one extrusion/intrusion to a face list (one polyhedron).

    Returns (new_faces, created_face_ids, next_fid).  Raises
    ProfileNotInterior / DepthExceedsSolid on invalid nodes.
    """
    t = TAU_GEO if tau is None else tau
    idx = next((i for i, f in enumerate(faces)
                if f.tag.get("face_id") == elab.base_face_id), None)
    if idx is None:
        raise MissingKey(None, f"face_id {elab.base_face_id}")
    face = faces[idx]
    ring2 = dedupe_consecutive(np.asarray(elab.profile, dtype=float), t)
    if len(ring2) < 3 or not ring_is_simple(ring2, t):
        raise ProfileNotInterior("profile ring is not a simple polygon")
    if ring_area(ring2) < 0:
        ring2 = ring2[::-1]
    if not _profile_clear_of_face(face, ring2, t):
        raise ProfileNotInterior(
            f"profile is not strictly inside face {elab.base_face_id}")
    n = face.normal()
    ring3 = np.array([face.to_world(p) for p in ring2])
    eid = elab.elaboration_id
    out = list(faces)
    created = []

    if elab.kind == EXTRUSION:
        depth = elab.depth
        if depth is THROUGH or depth is None or depth <= t:
            raise DepthExceedsSolid("extrusion depth must be positive")
        out[idx] = _punch_hole(face, ring2)
        cap_ring = ring3 + depth * n
        cap = Face3.from_rings3d([cap_ring], tag=_cap_tag(face.tag, eid, next_fid))
        created.append(next_fid)
        next_fid += 1
        walls = _wall_faces(ring3, cap_ring, face, eid, next_fid)
        next_fid += len(walls)
        created.extend(w.tag["face_id"] for w in walls)
        out.extend([cap] + walls)
        return out, created, next_fid

    if elab.kind != INTRUSION:
        raise ValueError(f"unknown elaboration kind {elab.kind!r}")

    centroid = ring3.mean(axis=0)
    cast_pts = np.vstack([ring3, centroid[None, :]])
    ts, hit_idx = _cast_thickness(out, idx, cast_pts, n, t)
    thickness = min(ts)

    if elab.is_through() or (elab.depth is not None
                             and abs(elab.depth - thickness) <= t):
        exits = set(hit_idx)
        if len(exits) != 1:
            raise ProfileNotInterior("through-cut must exit through one face")
        exit_idx = exits.pop()
        exit_face = out[exit_idx]
        exit_ring3 = ring3 - np.array(ts[:len(ring3)])[:, None] * n
        exit_ring2 = np.array([exit_face.to_frame(p) for p in exit_ring3])
        er = exit_ring2 if ring_area(exit_ring2) > 0 else exit_ring2[::-1]
        if not _profile_clear_of_face(exit_face, er, t):
            raise ProfileNotInterior("through-cut does not exit a face interior")
        out[idx] = _punch_hole(face, ring2)
        out[exit_idx] = _punch_hole(exit_face, er)
        walls = _wall_faces(ring3, exit_ring3, face, eid, next_fid)
        next_fid += len(walls)
        created.extend(w.tag["face_id"] for w in walls)
        out.extend(walls)
        return out, created, next_fid

    depth = elab.depth
    if depth is None or depth <= t:
        raise DepthExceedsSolid("intrusion depth must be positive")
    if depth >= thickness - t:
        raise DepthExceedsSolid(
            f"depth {depth} exceeds thickness {thickness:.6g} at the profile")
    out[idx] = _punch_hole(face, ring2)
    cap_ring = ring3 - depth * n
    cap = Face3.from_rings3d([cap_ring], tag=_cap_tag(face.tag, eid, next_fid))
    created.append(next_fid)
    next_fid += 1
    walls = _wall_faces(ring3, cap_ring, face, eid, next_fid)
    next_fid += len(walls)
    created.extend(w.tag["face_id"] for w in walls)
    out.extend([cap] + walls)
    return out, created, next_fid


def apply_elaborations(tree, tau=None):
    """Scene built by applying every node of the tree, level by level."""
    t = TAU_GEO if tau is None else tau
    solids = {}
    next_fid = 0
    for pid, poly in tree.bases:
        faces, next_fid = _tag_base(poly, pid, next_fid)
        solids[pid] = faces
    owner_of_face = {}
    for pid, faces in solids.items():
        for f in faces:
            owner_of_face[f.tag["face_id"]] = pid
    pending = list(tree.nodes)
    while pending:
        ready = [e for e in pending if e.base_face_id in owner_of_face]
        if not ready:
            raise MissingKey(None, f"unresolved base faces: "
                                   f"{[e.base_face_id for e in pending]}")
        for elab in ready:
            pid = owner_of_face[elab.base_face_id]
            solids[pid], created, next_fid = apply_elaboration(
                solids[pid], elab, next_fid, t)
            for fid in created:
                owner_of_face[fid] = pid
            pending.remove(elab)
    scene = Scene([Polyhedron(faces) for _, faces in sorted(solids.items())])
    scene.validate(t)
    return scene


# ---------------------------------------------------------------------------
# reconstruction engines

def _is_parallel(normal, n, ta):
    return abs(float(np.dot(normal, n))) >= math.cos(ta)


def _is_perpendicular(normal, n, ta):
    return abs(float(np.dot(normal, n))) <= math.sin(ta)


def _split_group(markers, face, ta=None):
    """(side_markers, cap_markers) relative to the face normal."""
    ta = TAU_AXIS if ta is None else ta
    n = face.normal()
    sides, caps = [], []
    for mid, m in markers:
        p = m.carrier_plane()
        if p is None:
            raise NonPerpendicularMarker(f"marker {mid} carries no plane/normal")
        if _is_perpendicular(p.normal, n, ta):
            sides.append((mid, m))
        elif _is_parallel(p.normal, n, ta):
            caps.append((mid, m))
        else:
            raise NonPerpendicularMarker(
                f"marker {mid} is neither parallel nor perpendicular to its base face")
    return sides, caps


def _side_line_in_frame(face, plane, tau):
    """2D line (normal, offset) of a perpendicular plane in the face frame."""
    nf = np.array([float(np.dot(plane.normal, face.ex)),
                   float(np.dot(plane.normal, face.ey))])
    ln = float(np.linalg.norm(nf))
    if ln < 1e-9:
        raise NonPerpendicularMarker("side plane parallel to the base face")
    off = (plane.offset - float(np.dot(plane.normal, face.origin))) / ln
    return nf / ln, off


def _line_key(nf, off, tau):
    n0, n1, d = float(nf[0]), float(nf[1]), float(off)
    if n0 < -1e-12 or (abs(n0) <= 1e-12 and n1 < 0):
        n0, n1, d = -n0, -n1, -d
    return (round(n0 / 1e-9), round(n1 / 1e-9), round(d / tau))


def _depth_and_kind(face, caps, tau):
    """Elaboration kind and depth from markers parallel to the face."""
    if not caps:
        return INTRUSION, THROUGH
    offsets = [face.plane.signed_distance(m.position) for _, m in caps]
    if max(offsets) - min(offsets) > 10 * tau:
        raise InconsistentDepth(
            f"parallel markers disagree: spread {max(offsets) - min(offsets):.3g}")
    s = float(np.mean(offsets))
    if abs(s) <= 10 * tau:
        raise InconsistentDepth("parallel markers sit on the base plane")
    return (EXTRUSION, s) if s > 0 else (INTRUSION, -s)


def _convex_profile(face, sides, caps, tau):
    """Convex profile polygon from side-plane inference in the face frame.

    For each distinct side line, the kept half-plane is the one containing
    all other projected markers of the elaboration (the planar analog of the
    one-side lemma); the profile is the intersection.
    """
    lines = {}
    for mid, m in sides:
        nf, off = _side_line_in_frame(face, m.carrier_plane(), tau)
        lines.setdefault(_line_key(nf, off, tau), (nf, off))
    if len(lines) < 3:
        raise Degenerate(f"profile needs >= 3 side planes, got {len(lines)}")
    pts = [face.to_frame(m.position) for _, m in sides]
    pts += [face.to_frame(m.position - face.plane.signed_distance(m.position)
                          * face.plane.normal) for _, m in caps]
    pts = np.array(pts)
    halfplanes = []
    for key in sorted(lines):
        nf, off = lines[key]
        vals = pts @ nf - off
        pos = bool(np.any(vals > 10 * tau))
        neg = bool(np.any(vals < -10 * tau))
        if pos and neg:
            raise SplitSides("projected markers lie on both sides of a profile edge")
        if pos:
            nf, off = -nf, -off
        halfplanes.append((nf, off))
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    pad = float(max(hi - lo)) + 1.0
    ring = np.array([[lo[0] - pad, lo[1] - pad], [hi[0] + pad, lo[1] - pad],
                     [hi[0] + pad, hi[1] + pad], [lo[0] - pad, hi[1] + pad]])
    for nf, off in halfplanes:
        ring = clip_ring_halfplane(ring, nf, off, tau)
        if len(ring) < 3:
            raise Degenerate("profile half-planes have empty intersection")
    ring = dedupe_consecutive(ring, 10 * tau)
    if len(ring) != len(lines):
        raise Degenerate(
            f"profile hull has {len(ring)} edges for {len(lines)} side planes")
    return ring


def _ordered_profile(face, sides, tau):
    """Profile polygon from clockwise-ordered side-face groups.

    Each order index names one side face; consecutive projected lines are
    intersected to form the profile vertices, so nonconvex profiles work.
    """
    groups = {}
    for mid, m in sides:
        if m.meta.order_index is None:
            raise MissingKey(mid, "order_index")
        groups.setdefault(m.meta.order_index, []).append((mid, m))
    order = sorted(groups)
    if order != list(range(len(order))):
        raise OrderCycleBroken(f"order indices {order} are not 0..k-1")
    lines = []
    for k in order:
        entries = groups[k]
        nf, off = _side_line_in_frame(face, entries[0][1].carrier_plane(), tau)
        for mid, m in entries[1:]:
            nf2, off2 = _side_line_in_frame(face, m.carrier_plane(), tau)
            if _line_key(nf, off, tau) != _line_key(nf2, off2, tau):
                raise OrderCycleBroken(
                    f"markers of order group {k} lie on different planes")
        lines.append((nf, off))
    m = len(lines)
    if m < 3:
        raise Degenerate("ordered profile needs >= 3 side faces")
    verts = []
    for k in range(m):
        (n1, d1), (n2, d2) = lines[k], lines[(k + 1) % m]
        det = float(n1[0] * n2[1] - n1[1] * n2[0])
        if abs(det) < 1e-9:
            raise OrderCycleBroken(
                f"consecutive ordered side planes {k} and {(k + 1) % m} are parallel")
        x = (d1 * n2[1] - d2 * n1[1]) / det
        y = (n1[0] * d2 - n2[0] * d1) / det
        verts.append((x, y))
    ring = np.array(verts)
    if not ring_is_simple(ring, tau):
        raise OrderCycleBroken("ordered profile boundary self-intersects")
    if ring_area(ring) < 0:
        ring = ring[::-1]
    return ring


def _markers_on_face(markup, face, tau):
    out = []
    for mid, m in markup.items():
        if face.contains_point(m.position, 100 * tau):
            p = m.carrier_plane()
            if p is not None and not face.plane.same_carrier(p, 100 * tau):
                continue
            out.append(mid)
    return out


def _stamp_face_ids(faces, created_fids, markup, tau):
    """Replace surgery-assigned ids on created faces with marker face ids."""
    for f in faces:
        if f.tag.get("face_id") not in created_fids:
            continue
        mids = _markers_on_face(markup, f, tau)
        fids = {markup.markers[i].meta.face_id for i in mids
                if markup.markers[i].meta.face_id is not None}
        if len(fids) > 1:
            raise InvalidMarkup(
                f"markers on one reconstructed face carry face ids {sorted(fids)}")
        if fids:
            f.tag["face_id"] = fids.pop()
    return faces


def _reconstruct_bases(markup, strict, tau):
    """Convex bases from markers without elaboration ids, tagged by the
    face ids their markers carry."""
    base_ids = [mid for mid, m in markup.items() if m.meta.elaboration_id is None]
    if not base_ids:
        raise MissingKey(None, "base-face markers (no elaboration_id)")
    base = markup.subset(base_ids)
    from ..markers import group_by
    groups = group_by(base, "polyhedron")
    solids = {}
    for pid in sorted(groups):
        sub = base.subset(groups[pid])
        poly = reconstruct_convex(sub, strict=strict, tau=tau)
        faces = []
        for f in poly.faces:
            mids = _markers_on_face(sub, f, tau)
            fids = {sub.markers[i].meta.face_id for i in mids
                    if sub.markers[i].meta.face_id is not None}
            if len(fids) > 1:
                raise InvalidMarkup(
                    f"base face of polyhedron {pid} carries face ids {sorted(fids)}")
            tag = {"polyhedron_id": pid,
                   "face_id": fids.pop() if fids else None}
            faces.append(Face3(f.plane, f.origin, f.ex, f.ey, f.polygon, tag))
        solids[pid] = faces
    return solids


def _run_hierarchy(markup, profile_builder, strict, tau):
    t = TAU_GEO if tau is None else tau
    solids = _reconstruct_bases(markup, strict, t)
    owner = {}
    for pid, faces in solids.items():
        for f in faces:
            if f.tag.get("face_id") is not None:
                owner[f.tag["face_id"]] = pid
    groups = {}
    for mid, m in markup.items():
        if m.meta.elaboration_id is not None:
            groups.setdefault(m.meta.elaboration_id, []).append((mid, m))
    pending = dict(groups)
    next_fid = 10 ** 9  # engine-internal ids; real ids stamped from markers
    while pending:
        ready = []
        for eid, members in pending.items():
            refs = {m.meta.base_face_ref for _, m in members}
            if len(refs) != 1 or None in refs:
                raise MissingKey(members[0][0], "base_face_ref")
            fid = refs.pop()[1]
            if fid in owner:
                ready.append((eid, members, fid))
        if not ready:
            raise MissingKey(None, f"unresolvable base faces for elaborations "
                                   f"{sorted(pending)}")
        for eid, members, fid in sorted(ready):
            pid = owner[fid]
            faces = solids[pid]
            face = next(f for f in faces if f.tag.get("face_id") == fid)
            sides, caps = _split_group(members, face)
            profile = profile_builder(face, sides, caps)
            kind, depth = _depth_and_kind(face, caps, t)
            elab = Elaboration(eid, kind, fid, profile, depth)
            new_faces, created, next_fid2 = apply_elaboration(faces, elab, next_fid, t)
            next_fid = next_fid2
            sub = markup.subset([mid for mid, _ in members])
            new_faces = _stamp_face_ids(new_faces, set(created), sub, t)
            solids[pid] = new_faces
            for f in new_faces:
                nf = f.tag.get("face_id")
                if nf is not None:
                    owner[nf] = pid
            del pending[eid]
    scene = Scene([Polyhedron(faces) for _, faces in sorted(solids.items())])
    scene.validate(t)
    return scene


def reconstruct_hierarchy(markup, strict=False, tau=None):
    """Scene from a hierarchy markup: convex bases plus convex elaborations.

    Requires polyhedron ids on base markers, face ids throughout, and
    elaboration_id plus base_face_ref on elaboration markers.  Profiles are
    convex hulls of the projected side planes; a parallel marker fixes the
    depth, none means a through intrusion.
    """
    t = TAU_GEO if tau is None else tau

    def build(face, sides, caps):
        return _convex_profile(face, sides, caps, t)

    return _run_hierarchy(markup, build, strict, t)


def reconstruct_hierarchy_nonconvex(markup, strict=False, tau=None):
    """Hierarchy engine for (possibly) nonconvex profiles.

    Side-face marker groups must carry order_index giving the clockwise
    order of the side faces; consecutive projected lines intersect to give
    the profile vertices.
    """
    t = TAU_GEO if tau is None else tau

    def build(face, sides, caps):
        return _ordered_profile(face, sides, t)

    return _run_hierarchy(markup, build, strict, t)


# ---------------------------------------------------------------------------
# rectangular elaborations without per-elaboration ids

_FLIP = {"L": "R", "R": "L", "T": "B", "B": "T"}


def _face_axes_from_normals(face, side_markers, ta=None):
    """In-plane orthonormal axes aligned with the side-marker normals."""
    ta = TAU_AXIS if ta is None else ta
    n = face.normal()
    first = side_markers[0][1].carrier_plane().normal
    ex3 = first - float(np.dot(first, n)) * n
    ex3 = ex3 / np.linalg.norm(ex3)
    ey3 = np.array([n[1] * ex3[2] - n[2] * ex3[1],
                    n[2] * ex3[0] - n[0] * ex3[2],
                    n[0] * ex3[1] - n[1] * ex3[0]])
    for mid, m in side_markers:
        v = m.carrier_plane().normal
        if not (_is_parallel(v, ex3, ta) or _is_parallel(v, ey3, ta)):
            raise NoConsistentSeed(
                f"side marker {mid} normal is not aligned with the face axes")
    return ex3, ey3


def _project_2d(face, ex3, ey3, position):
    r = np.asarray(position, dtype=float) - face.origin
    return (float(np.dot(r, ex3)), float(np.dot(r, ey3)))


def _rects_for_face(face, sides, tau):
    """Rectangle footprints of the elaborations on one face (point-normal)."""
    ex3, ey3 = _face_axes_from_normals(face, sides)
    markers2 = []
    for mid, m in sides:
        nv = m.normal
        n2 = (float(np.dot(nv, ex3)), float(np.dot(nv, ey3)))
        cls = classify_normal_2d(n2)
        if cls is None:
            raise NoConsistentSeed(f"side marker {mid} normal off-axis in frame")
        markers2.append(Marker2N(_project_2d(face, ex3, ey3, m.position), cls))
    # intrusion walls face into the pocket, so their projected classes are
    # inverted; extrusion walls project as-is.  Exactly one polarity parses.
    flipped = [Marker2N(m.position, _FLIP[m.normal_class]) for m in markers2]
    try:
        return reconstruct_rects(flipped, tau=tau), ex3, ey3, True
    except NoConsistentSeed:
        pass
    try:
        return reconstruct_rects(markers2, tau=tau), ex3, ey3, False
    except NoConsistentSeed:
        raise NoConsistentSeed(
            "side markers parse as neither all-intrusion nor all-extrusion "
            "rectangle sets on one face")


def _rect_profile_in_face_frame(face, ex3, ey3, rect):
    corners = [(rect.x0, rect.y0), (rect.x1, rect.y0),
               (rect.x1, rect.y1), (rect.x0, rect.y1)]
    ring = []
    for u, v in corners:
        p3 = face.origin + u * ex3 + v * ey3
        ring.append(face.to_frame(p3))
    ring = np.array(ring)
    return ring if ring_area(ring) > 0 else ring[::-1]


def reconstruct_rect_elab_multi(markup, strict=False, tau=None):
    """Scene from point-normal markup whose per-face elaborations are
    disjoint axis-aligned rectangles; no per-elaboration ids needed.

    Markers flag the base faces; every elaboration marker names its base
    face via base_face_ref (any shared elaboration_id flag).  Per base face
    the perpendicular markers are projected into the face frame and handed
    to the rectangle engine; markers inside each rectangle's cylinder fix
    the depth, none means a through intrusion.
    """
    t = TAU_GEO if tau is None else tau
    solids = _reconstruct_bases(markup, strict, t)
    owner = {}
    for pid, faces in solids.items():
        for f in faces:
            if f.tag.get("face_id") is not None:
                owner[f.tag["face_id"]] = pid
    groups = {}
    for mid, m in markup.items():
        if m.meta.elaboration_id is None:
            continue
        if m.meta.base_face_ref is None:
            raise MissingKey(mid, "base_face_ref")
        groups.setdefault(m.meta.base_face_ref[1], []).append((mid, m))
    pending = dict(groups)
    next_eid = 10 ** 6
    next_fid = 10 ** 9
    while pending:
        ready = [fid for fid in pending if fid in owner]
        if not ready:
            raise MissingKey(None, f"unresolvable base faces {sorted(pending)}")
        for fid in sorted(ready):
            members = pending.pop(fid)
            pid = owner[fid]
            faces = solids[pid]
            face = next(f for f in faces if f.tag.get("face_id") == fid)
            sides, caps = _split_group(members, face)
            if not sides:
                raise NoConsistentSeed("elaboration group has no side markers")
            rects, ex3, ey3, inverted = _rects_for_face(face, sides, t)
            cap_pts = [(mid, m, _project_2d(face, ex3, ey3, m.position))
                       for mid, m in caps]
            used_caps = set()
            for rect in rects.rectangles:
                inside = [(mid, m) for mid, m, q in cap_pts
                          if rect.x0 + t < q[0] < rect.x1 - t
                          and rect.y0 + t < q[1] < rect.y1 - t]
                used_caps.update(mid for mid, _ in inside)
                kind, depth = _depth_and_kind(face, inside, t)
                if inverted and kind == EXTRUSION:
                    raise InconsistentDepth(
                        "cap markers above an intrusion-polarity rectangle")
                profile = _rect_profile_in_face_frame(face, ex3, ey3, rect)
                elab = Elaboration(next_eid, kind, fid, profile, depth)
                next_eid += 1
                faces, created, next_fid = apply_elaboration(faces, elab, next_fid, t)
                sub = markup.subset([mid for mid, _ in members])
                faces = _stamp_face_ids(faces, set(created), sub, t)
            if used_caps != {mid for mid, _ in caps}:
                raise InconsistentDepth(
                    "parallel markers outside every rectangle cylinder")
            solids[pid] = faces
            for f in faces:
                nf = f.tag.get("face_id")
                if nf is not None:
                    owner[nf] = pid
    scene = Scene([Polyhedron(faces) for _, faces in sorted(solids.items())])
    scene.validate(t)
    return scene


# ---------------------------------------------------------------------------
# box with intrusions in one face

_AXIS_DIRS = [(k, s) for k in range(3) for s in (+1, -1)]


def _axis_of(normal, ta=None):
    ta = TAU_AXIS if ta is None else ta
    k = int(np.argmax(np.abs(normal)))
    if math.acos(min(1.0, abs(float(normal[k])))) > ta:
        raise InvalidMarkup("marker direction is not axis-aligned")
    return k, (+1 if normal[k] > 0 else -1)


def _tagged_box(lo, hi):
    from ..geom import make_box
    box = make_box(lo, hi)
    for i, f in enumerate(box.faces):
        f.tag.update({"polyhedron_id": 1, "face_id": i})
    return box


def reconstruct_box_intrusions_pn(markup, tau=None):
    """Box with disjoint axis-aligned rectangular intrusions in one face,
    from bare point-normal markers (no ids).

    The box comes from the extremal coordinates of the axis-classified
    markers; the intruded face is the one whose opposite direction is
    missing among interior marker normals (both missing means every
    intrusion is a through cut and either face works).
    """
    t = TAU_GEO if tau is None else tau
    lo = [None] * 3
    hi = [None] * 3
    entries = []
    for mid, m in markup.items():
        if m.kind != "point-normal":
            raise InvalidMarkup(f"marker {mid}: engine needs point-normal data")
        k, s = _axis_of(m.normal)
        c = float(m.position[k])
        lo[k] = c if lo[k] is None else min(lo[k], c)
        hi[k] = c if hi[k] is None else max(hi[k], c)
        entries.append((mid, m, k, s))
    if any(v is None for v in lo) or any(hi[k] - lo[k] <= t for k in range(3)):
        raise InvalidMarkup("markers do not span a box")
    box = _tagged_box(lo, hi)

    interior = []
    for mid, m, k, s in entries:
        c = float(m.position[k])
        plane_c = hi[k] if s > 0 else lo[k]
        if abs(c - plane_c) <= 10 * t:
            continue  # boundary marker
        interior.append((mid, m, k, s))
    if not interior:
        return box

    present = {(k, s) for _, _, k, s in interior}
    missing = [d for d in _AXIS_DIRS if d not in present]
    if len(missing) == 1:
        nu = (missing[0][0], -missing[0][1])
    elif len(missing) == 2 and missing[0][0] == missing[1][0]:
        nu = (missing[0][0], +1)
    else:
        raise NoEmptyClass(
            f"interior normal classes leave {len(missing)} empty directions; "
            "not a one-face-intrusion markup")

    k, s = nu
    face = next(f for f in box.faces
                if _axis_of(f.plane.normal) == (k, s))
    side_members = [(mid, m) for mid, m, kk, _ in interior if kk != k]
    cap_members = [(mid, m) for mid, m, kk, ss in interior if kk == k]
    for mid, m, kk, ss in interior:
        if kk == k and ss != s:
            raise NoEmptyClass(f"interior marker {mid} faces away from the "
                               "intruded face")
    return _apply_face_intrusions(box, face, side_members, cap_members,
                                  markup, t)


def _apply_face_intrusions(box, face, sides, caps, markup, t):
    faces = list(box.faces)
    fid = face.tag["face_id"]
    rects, ex3, ey3, inverted = _rects_for_face(face, sides, t)
    if not inverted:
        raise NoEmptyClass("projected side markers face outward; intrusions "
                           "must face into their pockets")
    cap_pts = [(mid, m, _project_2d(face, ex3, ey3, m.position))
               for mid, m in caps]
    used = set()
    next_eid, next_fid = 10 ** 6, 10 ** 9
    for rect in rects.rectangles:
        inside = [(mid, m) for mid, m, q in cap_pts
                  if rect.x0 + t < q[0] < rect.x1 - t
                  and rect.y0 + t < q[1] < rect.y1 - t]
        used.update(mid for mid, _ in inside)
        kind, depth = _depth_and_kind(face, inside, t)
        if kind == EXTRUSION:
            raise InconsistentDepth("cap markers lie outside the box")
        profile = _rect_profile_in_face_frame(face, ex3, ey3, rect)
        elab = Elaboration(next_eid, INTRUSION, fid, profile, depth)
        next_eid += 1
        faces, created, next_fid = apply_elaboration(faces, elab, next_fid, t)
    if used != {mid for mid, _ in caps}:
        raise InconsistentDepth("interior parallel markers outside every "
                                "rectangle cylinder")
    poly = Polyhedron(faces)
    poly.validate(t)
    for mid, m in markup.items():
        if not any(f.contains_point(m.position, 100 * t) for f in poly.faces):
            raise InvalidMarkup(f"marker {mid} not on the reconstructed solid")
    return poly


def reconstruct_box_intrusions_pp(markup, tau=None):
    """Box with disjoint axis-aligned rectangular intrusions in one face,
    from bare point-plane markers.

    Face identification follows the closest-parallel test: among interior
    markers parallel to a candidate face, take the closest; the face wins
    if a perpendicular marker sits closer.  A face with no parallel interior
    markers hosts only through intrusions.  Every surviving candidate is
    reconstructed by exhaustive rectangle-cover search and validated against
    the full markup; exactly one solid must survive.
    """
    t = TAU_GEO if tau is None else tau
    from ..oracle import enumerate_rect_sets, markup_consistent_with_scene
    from .rect2d import Marker2N as M2N

    lo = [None] * 3
    hi = [None] * 3
    entries = []
    for mid, m in markup.items():
        if m.kind != "point-plane":
            raise InvalidMarkup(f"marker {mid}: engine needs point-plane data")
        k, _ = _axis_of(m.plane.normal)
        off = float(m.position[k])
        lo[k] = off if lo[k] is None else min(lo[k], off)
        hi[k] = off if hi[k] is None else max(hi[k], off)
        entries.append((mid, m, k, off))
    if any(v is None for v in lo) or any(hi[k] - lo[k] <= t for k in range(3)):
        raise InvalidMarkup("markers do not span a box")
    box = _tagged_box(lo, hi)

    interior = [(mid, m, k, off) for mid, m, k, off in entries
                if abs(off - lo[k]) > 10 * t and abs(off - hi[k]) > 10 * t]
    if not interior:
        return box

    candidates = []
    for k, s in _AXIS_DIRS:
        face_off = hi[k] if s > 0 else lo[k]
        parallel = [(mid, m, off) for mid, m, kk, off in interior if kk == k]
        perpendicular = [(mid, m) for mid, m, kk, _ in interior if kk != k]
        if not parallel:
            candidates.append((k, s))
            continue
        dstar = min(abs(off - face_off) for _, _, off in parallel)
        if any(abs(float(m.position[k]) - face_off) < dstar - t
               for _, m in perpendicular):
            candidates.append((k, s))

    from ..geom import polyhedron_key
    solids = {}
    for k, s in candidates:
        face = next(f for f in box.faces if _axis_of(f.plane.normal) == (k, s))
        axes = [a for a in range(3) if a != k]
        ex3 = np.zeros(3); ex3[axes[0]] = 1.0
        ey3 = np.zeros(3); ey3[axes[1]] = 1.0
        if float(np.dot(np.cross(ex3, ey3), face.plane.normal)) == 0:
            pass
        items = []
        for mid, m, kk, off in interior:
            if kk == k:
                continue
            q = _project_2d(face, ex3, ey3, m.position)
            cls = "L" if kk == axes[0] else "T"  # axis only; signs unknown
            items.append(M2N(q, cls))
        try:
            rect_sols = enumerate_rect_sets(items, budget=200000,
                                            alignment_only=True, tau=t)
        except Exception:
            continue
        face_off = hi[k] if s > 0 else lo[k]
        for sol in rect_sols:
            if not sol and items:
                continue
            try:
                poly = _build_pp_candidate(box, face, ex3, ey3, sol,
                                           interior, k, face_off, t)
            except (DepthExceedsSolid, ProfileNotInterior, InconsistentDepth,
                    InvalidMarkup, NoConsistentSeed):
                continue
            if poly is None:
                continue
            if markup_consistent_with_scene(markup, Scene([poly]),
                                            require_full=True, tau=t):
                solids.setdefault(polyhedron_key(poly, t), poly)
    if not solids:
        raise FaceIdentificationFailed(
            "no box face admits a consistent intrusion reconstruction")
    if len(solids) > 1:
        raise FaceIdentificationFailed(
            f"{len(solids)} distinct reconstructions survive; markup is not a "
            "one-face-intrusion instance")
    return next(iter(solids.values()))


def _build_pp_candidate(box, face, ex3, ey3, rect_sol, interior, k, face_off, t):
    faces = list(box.faces)
    fid = face.tag["face_id"]
    caps2 = [(mid, m, _project_2d(face, ex3, ey3, m.position), off)
             for mid, m, kk, off in interior if kk == k]
    used = set()
    next_eid, next_fid = 10 ** 6, 10 ** 9
    from .rect2d import Rect
    for (x0, y0, x1, y1) in rect_sol:
        rect = Rect(x0, y0, x1, y1)
        inside = [(mid, m, off) for mid, m, q, off in caps2
                  if rect.x0 + t < q[0] < rect.x1 - t
                  and rect.y0 + t < q[1] < rect.y1 - t]
        used.update(mid for mid, _, _ in inside)
        if inside:
            offs = [abs(off - face_off) for _, _, off in inside]
            if max(offs) - min(offs) > 10 * t:
                raise InconsistentDepth("cap markers disagree inside a cylinder")
            depth = float(np.mean(offs))
        else:
            depth = THROUGH
        profile = _rect_profile_in_face_frame(face, ex3, ey3, rect)
        elab = Elaboration(next_eid, INTRUSION, fid, profile, depth)
        next_eid += 1
        faces, _, next_fid = apply_elaboration(faces, elab, next_fid, t)
    if used != {mid for mid, _, _, _ in caps2}:
        return None
    poly = Polyhedron(faces)
    poly.validate(t)
    return poly
