"""Brute-force enumeration of scenes consistent with a markup, on small
discretized instances.

Candidate geometry is restricted to coordinates/lines drawn from the markers
themselves: a consistent face must pass through marker positions, which makes
the enumeration finite and complete for the supported model classes.  The
oracle is a desk-scale instrument; budgets guard against blow-ups.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SearchBudgetExceeded
from .geom import (Line2, Plane3, Polygon2, Scene, TAU_GEO, point_in_ring,
                   ring_area, scene_key, snap_key)
from .geom.base import TAU_AXIS, cross2
from .geom.polygon import clip_ring_halfplane, dedupe_consecutive
from .markers import POINT, POINT_NORMAL, POINT_PLANE

RECT_SET_2D = "rect-set-2d"
CONVEX_POLYGON_SET_2D = "convex-polygon-set-2d"
CONVEX_3D = "convex-3d"
ORTHOGONAL_POLYHEDRON = "orthogonal-polyhedron"


@dataclass
class CandidateSpace:
    model_class: str
    budget: int = 10 ** 6
    interiors_disjoint: bool = True   # False demands disjoint closures
    alignment_only: bool = False      # ignore normal signs (point-line data)


# ---------------------------------------------------------------------------
# rectangle sets (2D)

class _IRects:
    """Markers in integer bucket space: (ix, iy, axis, sign_or_None)."""

    def __init__(self, markers, tau, alignment_only):
        self.tau = tau
        self.items = []
        self.rx = {}
        self.ry = {}
        for m in markers:
            ix = int(round(m.position[0] / tau))
            iy = int(round(m.position[1] / tau))
            self.rx.setdefault(ix, float(m.position[0]))
            self.ry.setdefault(iy, float(m.position[1]))
            cls = m.normal_class
            axis = "v" if cls in ("L", "R") else "h"
            sign = None if alignment_only else cls
            self.items.append((ix, iy, axis, sign))


def _marker_state(mk, rect):
    """'edge' (aligned, non-corner), 'corner', 'interior', or 'outside'."""
    ix, iy, axis, sign = mk
    x0, y0, x1, y1 = rect
    if not (x0 <= ix <= x1 and y0 <= iy <= y1):
        return "outside"
    on_v = ix in (x0, x1)
    on_h = iy in (y0, y1)
    if on_v and on_h:
        return "corner"
    if not on_v and not on_h:
        return "interior"
    if on_v:
        if axis != "v":
            return "interior"
        if sign is not None and sign != ("L" if ix == x0 else "R"):
            return "interior"
        return "edge"
    if axis != "h":
        return "interior"
    if sign is not None and sign != ("B" if iy == y0 else "T"):
        return "interior"
    return "edge"


def _rect_candidates(grid, budget):
    xs = sorted({m[0] for m in grid.items if m[2] == "v"})
    ys = sorted({m[1] for m in grid.items if m[2] == "h"})
    cands = []
    count = 0
    for x0, x1 in itertools.combinations(xs, 2):
        for y0, y1 in itertools.combinations(ys, 2):
            count += 1
            if count > budget:
                raise SearchBudgetExceeded(
                    f"rectangle candidate grid exceeds budget {budget}")
            rect = (x0, y0, x1, y1)
            edges = {"L": False, "R": False, "T": False, "B": False}
            ok = True
            for mk in grid.items:
                state = _marker_state(mk, rect)
                if state == "corner":
                    ok = False
                    break
                if state == "edge":
                    ix, iy = mk[0], mk[1]
                    if mk[2] == "v":
                        edges["L" if ix == x0 else "R"] = True
                    else:
                        edges["B" if iy == y0 else "T"] = True
            if ok and all(edges.values()):
                cands.append(rect)
    return cands


def _rects_disjoint(a, b, closed):
    if closed:
        return a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1]
    return a[2] <= b[0] or b[2] <= a[0] or a[3] <= b[1] or b[3] <= a[1]


def enumerate_rect_sets(markers, budget=10 ** 6, alignment_only=False,
                        interiors_disjoint=False, tau=None):
    """All rectangle sets fully consistent with 2D marker-per-edge markup.

    markers: rect2d.Marker2N items.  Returns a list of solutions; each is a
    sorted tuple of (x0, y0, x1, y1) rectangles in original coordinates.
    """
    t = TAU_GEO if tau is None else tau
    grid = _IRects(markers, t, alignment_only)
    if not grid.items:
        return [()]
    cands = _rect_candidates(grid, budget)
    n = len(grid.items)
    solutions = set()
    nodes = 0

    def covered_ok(rect, chosen):
        return all(_rects_disjoint(rect, c, not interiors_disjoint)
                   for c in chosen)

    def consistent_so_far(chosen_set, mk):
        state_any = False
        for r in chosen_set:
            s = _marker_state(mk, r)
            if s in ("interior", "corner"):
                return None
            if s == "edge":
                state_any = True
        return state_any

    def search(idx_uncovered, chosen):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(f"rect-set search exceeded {budget} nodes")
        # find first marker not on any chosen rect
        target = None
        for mk in grid.items:
            st = consistent_so_far(chosen, mk)
            if st is None:
                return
            if not st:
                target = mk
                break
        if target is None:
            sol = tuple(sorted(
                (grid.rx[r[0]], grid.ry[r[1]], grid.rx[r[2]], grid.ry[r[3]])
                for r in chosen))
            solutions.add(sol)
            return
        for rect in cands:
            if _marker_state(target, rect) == "edge" and covered_ok(rect, chosen):
                search(idx_uncovered, chosen + [rect])

    search(0, [])
    return sorted(solutions)


# ---------------------------------------------------------------------------
# convex polygon sets (2D, point-line markers)

@dataclass(frozen=True)
class Marker2L:
    """2D marker with position and the direction of the edge it lies on."""

    position: tuple
    direction: tuple


def _poly_key(ring, tau):
    keys = [snap_key(p, tau) for p in ring]
    start = min(range(len(keys)), key=lambda i: keys[i])
    rolled = keys[start:] + keys[:start]
    return tuple(rolled)


def _marker_on_ring_aligned(m, ring, tau):
    """Marker lies on a ring edge whose direction matches; corners excluded."""
    pos = np.asarray(m.position, dtype=float)
    d = np.asarray(m.direction, dtype=float)
    d = d / np.linalg.norm(d)
    n = len(ring)
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        e = b - a
        ln = np.linalg.norm(e)
        if ln <= tau:
            continue
        u = e / ln
        if abs(cross2(u, d)) > 1e-7:
            continue
        s = float(np.dot(pos - a, u))
        if tau < s < ln - tau and abs(cross2(u, pos - a)) <= 10 * tau:
            return True
    return False


def _marker_interior_to_poly(m, ring, tau):
    side = point_in_ring(m.position, ring, tau)
    if side > 0:
        return True
    if side == 0 and not _marker_on_ring_aligned(m, ring, tau):
        return True
    return False


def enumerate_convex_polygon_sets(markers, budget=10 ** 6,
                                  interiors_disjoint=True, tau=None):
    """All sets of disjoint convex polygons fully consistent with 2D
    point-line markers (one marker per edge rule).

    Candidate polygons are intersections of half-planes of the marker lines
    (both side choices tried); candidates must have every edge marked.
    """
    t = TAU_GEO if tau is None else tau
    lines = {}
    for m in markers:
        ln = Line2.from_point_direction(m.position, m.direction)
        lines.setdefault(ln.carrier_key(t), ln)
    lines = [lines[k] for k in sorted(lines)]
    n = len(lines)
    if 3 ** n > budget:
        raise SearchBudgetExceeded(f"3^{n} line-side assignments exceed budget")
    pts = np.array([m.position for m in markers], dtype=float)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    pad = float(max(hi - lo)) * 2 + 1.0
    frame = np.array([[lo[0] - pad, lo[1] - pad], [hi[0] + pad, lo[1] - pad],
                      [hi[0] + pad, hi[1] + pad], [lo[0] - pad, hi[1] + pad]])

    cands = []
    seen = set()
    for states in itertools.product((0, 1, -1), repeat=n):
        chosen = [(lines[i], s) for i, s in enumerate(states) if s != 0]
        if len(chosen) < 3:
            continue
        ring = frame
        for ln, s in chosen:
            nrm = np.array(ln.normal) * s
            off = ln.offset * s
            ring = clip_ring_halfplane(ring, nrm, off, t)
            if len(ring) < 3:
                break
        if len(ring) < 3 or abs(ring_area(ring)) <= t:
            continue
        # reject unbounded (touching the synthetic frame)
        if np.any(np.abs(ring[:, 0] - (lo[0] - pad)) <= 10 * t) or \
           np.any(np.abs(ring[:, 0] - (hi[0] + pad)) <= 10 * t) or \
           np.any(np.abs(ring[:, 1] - (lo[1] - pad)) <= 10 * t) or \
           np.any(np.abs(ring[:, 1] - (hi[1] + pad)) <= 10 * t):
            continue
        # every chosen line must support an edge; every edge must carry a marker
        ring = dedupe_consecutive(ring, t)
        if len(ring) != len(chosen):
            continue
        edge_marked = True
        nr = len(ring)
        for i in range(nr):
            a, b = ring[i], ring[(i + 1) % nr]
            seg_marked = False
            for m in markers:
                e = b - a
                u = e / np.linalg.norm(e)
                d = np.asarray(m.direction, float)
                d = d / np.linalg.norm(d)
                if abs(cross2(u, d)) > 1e-7:
                    continue
                s = float(np.dot(np.asarray(m.position) - a, u))
                if t < s < np.linalg.norm(e) - t and \
                        abs(cross2(u, np.asarray(m.position) - a)) <= 10 * t:
                    seg_marked = True
                    break
            if not seg_marked:
                edge_marked = False
                break
        if not edge_marked:
            continue
        key = _poly_key(ring, t)
        if key in seen:
            continue
        seen.add(key)
        cands.append(ring)

    solutions = set()
    nodes = 0

    def _proper_cross(a, b, c, d):
        d1 = cross2(d - c, a - c)
        d2 = cross2(d - c, b - c)
        d3 = cross2(b - a, c - a)
        d4 = cross2(b - a, d - a)
        return ((d1 > t and d2 < -t) or (d1 < -t and d2 > t)) and \
               ((d3 > t and d4 < -t) or (d3 < -t and d4 > t))

    def poly_disjoint(r1, r2):
        # disjoint interiors: flush boundary contact (collinear overlap) is
        # allowed, strictly interior points and proper crossings are not
        n1, n2 = len(r1), len(r2)
        probes1 = list(r1) + [(r1[i] + r1[(i + 1) % n1]) / 2 for i in range(n1)]
        probes2 = list(r2) + [(r2[j] + r2[(j + 1) % n2]) / 2 for j in range(n2)]
        for p in probes1:
            if point_in_ring(p, r2, t) > 0:
                return False
        for p in probes2:
            if point_in_ring(p, r1, t) > 0:
                return False
        for i in range(n1):
            for j in range(n2):
                if _proper_cross(r1[i], r1[(i + 1) % n1],
                                 r2[j], r2[(j + 1) % n2]):
                    return False
        if not interiors_disjoint:
            # closures must be disjoint: no boundary contact at all
            for p in probes1:
                if point_in_ring(p, r2, t) >= 0:
                    return False
            for p in probes2:
                if point_in_ring(p, r1, t) >= 0:
                    return False
        return True

    def extend_optionals(chosen, start):
        # every candidate has all edges marked, so a scene may contain extra
        # polygons beyond those needed to cover the markers
        nonlocal nodes
        solutions.add(tuple(sorted(_poly_key(r, t) for r in chosen)))
        used = {_poly_key(r, t) for r in chosen}
        for i in range(start, len(cands)):
            nodes += 1
            if nodes > budget:
                raise SearchBudgetExceeded("convex-polygon search exceeded budget")
            ring = cands[i]
            if _poly_key(ring, t) in used:
                continue
            if any(_marker_interior_to_poly(m, ring, t) for m in markers):
                continue
            if all(poly_disjoint(ring, c) for c in chosen):
                extend_optionals(chosen + [ring], i + 1)

    def search(chosen):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded("convex-polygon search exceeded budget")
        target = None
        for m in markers:
            if any(_marker_interior_to_poly(m, r, t) for r in chosen):
                return
            if not any(_marker_on_ring_aligned(m, r, t) for r in chosen):
                target = m
                break
        if target is None:
            extend_optionals(chosen, 0)
            return
        for ring in cands:
            if _marker_on_ring_aligned(target, ring, t) and \
                    all(poly_disjoint(ring, c) for c in chosen):
                search(chosen + [ring])

    search([])
    key_to_ring = {_poly_key(r, t): r for r in cands}
    return [tuple(key_to_ring[k] for k in sol) for sol in sorted(solutions)]


# ---------------------------------------------------------------------------
# convex polyhedra (3D)

def enumerate_convex_3d(markup, budget=10 ** 6, tau=None):
    """All convex polyhedra consistent with a marker-per-face markup.

    Tries every side assignment of the distinct marker planes; a candidate
    counts when every marker lies on its boundary and every face carries a
    marker.  Returns canonically distinct polyhedra.
    """
    from .errors import Degenerate, Empty, Unbounded
    from .geom import HalfSpace3, canonicalize, intersect_halfspaces, polyhedron_key

    t = TAU_GEO if tau is None else tau
    planes = {}
    for mid, m in markup.items():
        p = m.carrier_plane()
        if p is None:
            raise ValueError("convex-3d oracle needs point-plane/point-normal markers")
        planes.setdefault(p.carrier_key(t), p)
    planes = [planes[k] for k in sorted(planes)]
    n = len(planes)
    if 2 ** n > budget:
        raise SearchBudgetExceeded(f"2^{n} side assignments exceed budget")
    out = {}
    for signs in itertools.product((+1, -1), repeat=n):
        hs = [HalfSpace3(p, s) for p, s in zip(planes, signs)]
        try:
            poly = intersect_halfspaces(hs, tau=t)
        except (Unbounded, Empty, Degenerate):
            continue
        ok = True
        for mid, m in markup.items():
            mp = m.carrier_plane()
            if not any(f.contains_point(m.position, 100 * t)
                       and f.plane.same_carrier(mp, 100 * t) for f in poly.faces):
                ok = False
                break
            if m.kind == POINT_NORMAL:
                if not any(f.contains_point(m.position, 100 * t)
                           and float(np.dot(f.plane.normal, m.normal)) > 0.999
                           for f in poly.faces):
                    ok = False
                    break
        if not ok:
            continue
        for f in poly.faces:
            if not any(f.contains_point(m.position, 100 * t)
                       for m in markup.values()):
                ok = False
                break
        if ok:
            out.setdefault(polyhedron_key(poly, t), poly)
    return [out[k] for k in sorted(out)]


# ---------------------------------------------------------------------------
# scene-level consistency (3D)

def markers_on_scene(markup, scene, tau=None):
    """For each marker id, the set of (polyhedron, face) indices it lies on,
    aligned; empty set means the marker is inconsistent with the scene."""
    t = TAU_GEO if tau is None else tau
    hits = {}
    for mid, m in markup.items():
        found = set()
        for pi, poly in enumerate(scene.polyhedra):
            for fi, f in enumerate(poly.faces):
                if not f.contains_point(m.position, 100 * t):
                    continue
                if m.kind == POINT_PLANE:
                    if not f.plane.same_carrier(m.plane, 100 * t):
                        continue
                elif m.kind == POINT_NORMAL:
                    if float(np.dot(f.plane.normal, m.normal)) < 0.999:
                        continue
                found.add((pi, fi))
        hits[mid] = found
    return hits


def markup_consistent_with_scene(markup, scene, require_full=True,
                                 respect=(), tau=None):
    """Geometric (and optionally metadata-respecting) consistency check.

    respect may contain 'polyhedron_id' (same-id markers on one polyhedron,
    distinct ids on distinct polyhedra) and 'face_id' (same-id markers share
    a face).
    """
    t = TAU_GEO if tau is None else tau
    hits = markers_on_scene(markup, scene, t)
    if any(not v for v in hits.values()):
        return False
    if require_full:
        per_face = set()
        for v in hits.values():
            per_face.update(v)
        for pi, poly in enumerate(scene.polyhedra):
            for fi in range(len(poly.faces)):
                if (pi, fi) not in per_face:
                    return False
    if "face_id" in respect:
        groups = {}
        for mid, m in markup.items():
            if m.meta.face_id is not None:
                groups.setdefault(m.meta.face_id, []).append(mid)
        for mids in groups.values():
            common = set.intersection(*(hits[i] for i in mids))
            if not common:
                return False
    if "polyhedron_id" in respect:
        groups = {}
        for mid, m in markup.items():
            if m.meta.polyhedron_id is not None:
                groups.setdefault(m.meta.polyhedron_id, []).append(mid)
        # ids are a placement contract: every polyhedron of the true scene
        # got its own id, so the counts must match
        if groups and len(scene.polyhedra) != len(groups):
            return False
        cand = {}
        for gid, mids in groups.items():
            polys = set.intersection(*({pi for pi, _ in hits[i]} for i in mids))
            if not polys:
                return False
            cand[gid] = polys
        # distinct groups need distinct polyhedra: search a system of
        # distinct representatives
        gids = sorted(cand)

        def assign(i, used):
            if i == len(gids):
                return True
            for pi in sorted(cand[gids[i]]):
                if pi not in used and assign(i + 1, used | {pi}):
                    return True
            return False

        if not assign(0, frozenset()):
            return False
    return True


# ---------------------------------------------------------------------------
# orthogonal box sets (3D)

def _box_marker_state(mk, box, tau_strict=0):
    """mk = (pos3 ints, axis, sign_or_None); box = (lo3, hi3) ints."""
    pos, axis, sign = mk
    lo, hi = box
    if any(pos[k] < lo[k] or pos[k] > hi[k] for k in range(3)):
        return "outside"
    on = [pos[k] in (lo[k], hi[k]) for k in range(3)]
    n_on = sum(on)
    if n_on == 0:
        return "interior"
    if n_on >= 2:
        return "corner"
    k = on.index(True)
    if k != axis:
        return "interior"
    if sign is not None:
        want = -1 if pos[k] == lo[k] else +1
        if sign != want:
            return "interior"
    return ("edge", k, -1 if pos[k] == lo[k] else +1)


def enumerate_box_sets(markup, budget=10 ** 6, tau=None):
    """All sets of disjoint axis-aligned boxes fully consistent with a
    marker-per-face markup (the enumerable core of the orthogonal class).

    Markers must carry axis-aligned planes or normals.
    """
    t = TAU_GEO if tau is None else tau
    items = []
    restore = [{}, {}, {}]
    for mid, m in markup.items():
        p = m.carrier_plane()
        if p is None:
            raise ValueError("orthogonal oracle needs plane or normal data")
        axis = int(np.argmax(np.abs(p.normal)))
        if math.acos(min(1.0, abs(float(p.normal[axis])))) > TAU_AXIS:
            raise ValueError("orthogonal oracle needs axis-aligned markers")
        sign = None
        if m.kind == POINT_NORMAL:
            sign = +1 if m.normal[axis] > 0 else -1
        pos = tuple(int(round(float(c) / t)) for c in m.position)
        for k in range(3):
            restore[k].setdefault(pos[k], float(m.position[k]))
        items.append((pos, axis, sign))

    coords = [sorted({it[0][k] for it in items if it[1] == k}) for k in range(3)]
    cands = []
    count = 0
    for x0, x1 in itertools.combinations(coords[0], 2):
        for y0, y1 in itertools.combinations(coords[1], 2):
            for z0, z1 in itertools.combinations(coords[2], 2):
                count += 1
                if count > budget:
                    raise SearchBudgetExceeded("box candidate grid too large")
                box = ((x0, y0, z0), (x1, y1, z1))
                faces_hit = set()
                ok = True
                for it in items:
                    st = _box_marker_state(it, box)
                    if st == "corner":
                        ok = False
                        break
                    if isinstance(st, tuple):
                        faces_hit.add((st[1], st[2]))
                if ok and len(faces_hit) == 6:
                    cands.append(box)

    def boxes_disjoint(a, b):
        return any(a[1][k] < b[0][k] or b[1][k] < a[0][k] for k in range(3))

    solutions = set()
    nodes = 0

    def search(chosen):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded("box-set search exceeded budget")
        target = None
        for it in items:
            on_any = False
            for b in chosen:
                st = _box_marker_state(it, b)
                if st in ("interior", "corner"):
                    return
                if isinstance(st, tuple):
                    on_any = True
            if not on_any:
                target = it
                break
        if target is None:
            solutions.add(tuple(sorted(chosen)))
            return
        for box in cands:
            if isinstance(_box_marker_state(target, box), tuple) and \
                    all(boxes_disjoint(box, c) for c in chosen):
                search(chosen + [box])

    search([])
    out = []
    for sol in sorted(solutions):
        boxes = []
        for lo, hi in sol:
            boxes.append((tuple(restore[k][lo[k]] for k in range(3)),
                          tuple(restore[k][hi[k]] for k in range(3))))
        out.append(tuple(boxes))
    return out


# ---------------------------------------------------------------------------
# public entry points

def _markup_to_2d_normals(markup, tau):
    """Project markers with in-plane normals to 2D; cap markers of a prism
    lift (horizontal carriers) carry no 2D information and are skipped."""
    from .recon.rect2d import Marker2N, classify_normal_2d
    ms = []
    for mid, m in markup.items():
        if m.kind != POINT_NORMAL:
            raise ValueError("rect-set-2d oracle needs point-normal markers")
        if abs(m.normal[2]) > 1e-9:
            continue
        cls = classify_normal_2d(m.normal[:2])
        if cls is None:
            raise ValueError("rect-set-2d oracle needs axis-aligned normals")
        ms.append(Marker2N((float(m.position[0]), float(m.position[1])), cls))
    if not ms:
        raise ValueError("no markers with in-plane normals")
    return ms


def _markup_to_2d_lines(markup, tau):
    """Project markers with vertical carrier planes to 2D point-line data;
    markers on horizontal planes (prism caps) are skipped."""
    ms = []
    for mid, m in markup.items():
        p = m.carrier_plane()
        if p is None:
            raise ValueError("convex-polygon-set-2d oracle needs planar markers")
        if abs(p.normal[2]) > 1e-9:
            continue
        d = (-float(p.normal[1]), float(p.normal[0]))
        ms.append(Marker2L((float(m.position[0]), float(m.position[1])), d))
    if not ms:
        raise ValueError("no markers with vertical carrier planes")
    return ms


def enumerate_consistent(markup, space, tau=None):
    """Complete list of fully consistent scenes within the candidate space.

    2D model classes return 2D interpretations (rect tuples / vertex rings);
    3D classes return Scene objects.
    """
    t = TAU_GEO if tau is None else tau
    if space.model_class == RECT_SET_2D:
        ms = markup if isinstance(markup, list) else _markup_to_2d_normals(markup, t)
        return enumerate_rect_sets(ms, space.budget,
                                   alignment_only=space.alignment_only,
                                   interiors_disjoint=space.interiors_disjoint,
                                   tau=t)
    if space.model_class == CONVEX_POLYGON_SET_2D:
        ms = markup if isinstance(markup, list) else _markup_to_2d_lines(markup, t)
        return enumerate_convex_polygon_sets(
            ms, space.budget, interiors_disjoint=space.interiors_disjoint, tau=t)
    if space.model_class == CONVEX_3D:
        polys = enumerate_convex_3d(markup, space.budget, tau=t)
        return [Scene([p]) for p in polys]
    if space.model_class == ORTHOGONAL_POLYHEDRON:
        from .geom import make_box
        sols = enumerate_box_sets(markup, space.budget, tau=t)
        return [Scene([make_box(lo, hi) for lo, hi in sol]) for sol in sols]
    raise ValueError(f"unknown model class {space.model_class!r}")


def is_ambiguous(markup, space, tau=None):
    """(True, witnesses) when >= 2 interpretations exist, else (False, rest)."""
    found = enumerate_consistent(markup, space, tau)
    return (len(found) >= 2, found)
