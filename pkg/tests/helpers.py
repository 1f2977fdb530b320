"""Shared generators for the test suite: random convex polytopes, rectangle
sets with per-edge markers, elaboration trees, rectilinear polygons and
orthogonal scenes.  Everything is seeded; no global random state."""

import math
import random

import numpy as np

from polyrecon.errors import (Degenerate, Empty, PolyreconError, Unbounded)
from polyrecon.geom import (Face3, HalfSpace3, Plane3, Polyhedron, Scene,
                            intersect_halfspaces, make_box, orient_faces)
from polyrecon.recon.elaboration import (Elaboration, ElaborationTree,
                                         EXTRUSION, INTRUSION, THROUGH,
                                         apply_elaborations)
from polyrecon.recon.rect2d import Marker2N, Rect, L, R, T, B


def random_convex_polytope(rng, nplanes):
    """Intersection of half-spaces tangent to spheres of random radii."""
    while True:
        hs = []
        for _ in range(nplanes):
            v = np.array([rng.gauss(0, 1) for _ in range(3)])
            v /= np.linalg.norm(v)
            hs.append(HalfSpace3(Plane3(v, rng.uniform(0.8, 1.5)), +1))
        try:
            poly = intersect_halfspaces(hs)
        except (Unbounded, Empty, Degenerate):
            continue
        return poly


def random_rect_set(rng, n, span=40, maxside=8):
    rects, tries = [], 0
    while len(rects) < n and tries < 4000:
        tries += 1
        x0 = rng.randint(0, span - 2)
        y0 = rng.randint(0, span - 2)
        cand = Rect(float(x0), float(y0),
                    float(x0 + rng.randint(1, maxside)),
                    float(y0 + rng.randint(1, maxside)))
        if all(cand.disjoint_from(r) for r in rects):
            rects.append(cand)
    return rects


def mark_rects(rng, rects, kmin=1, kmax=3, integer_grid=False):
    ms = []
    for r in rects:
        for cls in (L, R, T, B):
            for _ in range(rng.randint(kmin, kmax)):
                if cls in (L, R):
                    x = r.x0 if cls == L else r.x1
                    y = (rng.randint(int(r.y0) * 2 + 1, int(r.y1) * 2 - 1) / 2.0
                         if integer_grid else rng.uniform(r.y0 + 1e-3, r.y1 - 1e-3))
                    ms.append(Marker2N((x, y), cls))
                else:
                    y = r.y0 if cls == B else r.y1
                    x = (rng.randint(int(r.x0) * 2 + 1, int(r.x1) * 2 - 1) / 2.0
                         if integer_grid else rng.uniform(r.x0 + 1e-3, r.x1 - 1e-3))
                    ms.append(Marker2N((x, y), cls))
    rng.shuffle(ms)
    return ms


def shrunk_profile(face, factor=0.35, rng=None):
    """Profile strictly inside a face: its outer ring scaled toward the
    vertex centroid."""
    ring = face.polygon.outer
    c = ring.mean(axis=0)
    if face.polygon.contains(c, 1e-9) != 1:
        return None
    f = factor if rng is None else factor * rng.uniform(0.7, 1.1)
    prof = c + (ring - c) * f
    return prof


def random_elab_tree(rng, n_bases=1, n_nodes=2, levels=2, lshaped=False):
    """Elaboration tree over box/convex bases with strictly interior profiles.

    Returns (tree, scene) where scene = apply_elaborations(tree); retries
    node choices that violate depth/interior preconditions.
    """
    bases = []
    for b in range(n_bases):
        if rng.random() < 0.5:
            w, d, h = (rng.uniform(0.8, 1.6) for _ in range(3))
            poly = make_box((0, 0, 0), (w, d, h))
        else:
            poly = random_convex_polytope(rng, rng.randint(6, 10))
        off = np.array([3.5 * b, 0.0, 0.0])
        moved = Polyhedron([Face3.from_rings3d([r + off for r in f.world_rings()])
                            for f in poly.faces])
        bases.append((b + 1, moved))
    tree = ElaborationTree(bases, [])
    scene = apply_elaborations(tree)
    eid = 100
    attempts = 0
    while len(tree.nodes) < n_nodes and attempts < 40 * n_nodes:
        attempts += 1
        faces = [f for p in scene.polyhedra for f in p.faces]
        pool = [f for f in faces if f.polygon.area() > 0.2
                and _tree_level(f, tree, scene) < levels]
        if not pool:
            break
        face = pool[rng.randrange(len(pool))]
        if lshaped:
            prof = _l_profile(face, rng)
        else:
            prof = shrunk_profile(face, rng.uniform(0.25, 0.45))
        if prof is None:
            continue
        kind = INTRUSION if rng.random() < 0.6 else EXTRUSION
        if kind == EXTRUSION:
            depth = rng.uniform(0.15, 0.5)
        else:
            depth = THROUGH if rng.random() < 0.4 else rng.uniform(0.1, 0.35)
        node = Elaboration(eid, kind, face.tag["face_id"], prof, depth)
        try:
            scene = apply_elaborations(
                ElaborationTree(tree.bases, tree.nodes + [node]))
        except PolyreconError:
            continue
        tree.nodes.append(node)
        eid += 1
    return tree, scene


def _tree_level(face, tree, scene):
    """How many elaborations deep a face was created (base faces are 0)."""
    by_id = {f.tag["face_id"]: f for p in scene.polyhedra for f in p.faces}
    elabs = {e.elaboration_id: e for e in tree.nodes}
    level = 0
    cur = face
    guard = 0
    while cur.tag.get("elaboration_id") is not None and guard < 20:
        guard += 1
        level += 1
        e = elabs.get(cur.tag["elaboration_id"])
        if e is None or e.base_face_id not in by_id:
            break
        cur = by_id[e.base_face_id]
    return level


def _l_profile(face, rng):
    """L-shaped (6-vertex) profile strictly inside the face."""
    ring = face.polygon.outer
    c = ring.mean(axis=0)
    if face.polygon.contains(c, 1e-9) != 1:
        return None
    xmin, ymin, xmax, ymax = face.polygon.bbox()
    w = min(xmax - xmin, ymax - ymin) * rng.uniform(0.2, 0.3)
    if w < 0.05:
        return None
    prof = np.array([c + [-w, -w], c + [w, -w], c + [w, 0.0],
                     c + [0.0, 0.0], c + [0.0, w], c + [-w, w]])
    for p in prof:
        if face.polygon.contains(p, 1e-9) != 1:
            return None
    return prof


def random_box_with_intrusions(rng, max_rects=6, all_through=False):
    """(tree, scene) for a box with disjoint rectangular intrusions in the
    top face."""
    w, d, h = (rng.uniform(1.0, 2.0) for _ in range(3))
    box = make_box((0, 0, 0), (w, d, h))
    top_i = next(i for i, f in enumerate(box.faces)
                 if abs(f.plane.normal[2] - 1) < 1e-9)
    top = box.faces[top_i]
    xmin, ymin, xmax, ymax = top.polygon.bbox()
    n = rng.randint(1, max_rects)
    rects = []
    tries = 0
    while len(rects) < n and tries < 300:
        tries += 1
        rw = rng.uniform(0.08, 0.3) * (xmax - xmin)
        rh = rng.uniform(0.08, 0.3) * (ymax - ymin)
        cx = rng.uniform(xmin + rw + 0.02, xmax - rw - 0.02)
        cy = rng.uniform(ymin + rh + 0.02, ymax - rh - 0.02)
        cand = (cx - rw, cy - rh, cx + rw, cy + rh)
        if all(cand[2] + 0.02 < o[0] or o[2] + 0.02 < cand[0]
               or cand[3] + 0.02 < o[1] or o[3] + 0.02 < cand[1] for o in rects):
            rects.append(cand)
    nodes = []
    for i, (x0, y0, x1, y1) in enumerate(rects):
        prof = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
        through = all_through or rng.random() < 0.35
        depth = THROUGH if through else rng.uniform(0.15, 0.8) * h
        nodes.append(Elaboration(50 + i, INTRUSION, top_i, prof, depth))
    tree = ElaborationTree([(1, box)], nodes)
    return tree, apply_elaborations(tree)


def random_polyomino_polygon(rng, max_cells=40, grid=12):
    """Simple rectilinear polygon (no 180-degree vertices) as the boundary
    of a random connected hole-free polyomino; returns the vertex array."""
    from polyrecon.geom.polygon import merge_regions

    cells = {(rng.randrange(grid), rng.randrange(grid))}
    target = rng.randint(1, max_cells)
    while len(cells) < target:
        cx, cy = rng.choice(sorted(cells))
        dx, dy = rng.choice([(1, 0), (-1, 0), (0, 1), (0, -1)])
        nxt = (cx + dx, cy + dy)
        if 0 <= nxt[0] < grid and 0 <= nxt[1] < grid:
            cells.add(nxt)
    rings_list = []
    for (cx, cy) in sorted(cells):
        ring = np.array([[cx, cy], [cx + 1, cy], [cx + 1, cy + 1], [cx, cy + 1]],
                        dtype=float)
        rings_list.append([ring])
    polys = merge_regions(rings_list)
    if len(polys) != 1 or polys[0].holes:
        return None
    return polys[0].outer


def random_orthogonal_scene(rng, max_solids=2):
    solids = []
    n = rng.randint(1, max_solids)
    for i in range(n):
        w, d, h = (rng.uniform(0.6, 1.4) for _ in range(3))
        off = np.array([i * 3.0, 0.0, 0.0])
        solids.append(make_box(off, off + np.array([w, d, h])))
    return Scene(solids)


def prism_over(ring2, z0=0.0, z1=1.0):
    ring2 = np.asarray(ring2, dtype=float)
    n = len(ring2)
    bot = np.array([[p[0], p[1], z0] for p in ring2])[::-1]
    top = np.array([[p[0], p[1], z1] for p in ring2])
    faces = [Face3.from_rings3d([bot]), Face3.from_rings3d([top])]
    for i in range(n):
        a, b = ring2[i], ring2[(i + 1) % n]
        quad = np.array([[a[0], a[1], z0], [b[0], b[1], z0],
                         [b[0], b[1], z1], [a[0], a[1], z1]])
        faces.append(Face3.from_rings3d([quad]))
    return Polyhedron(orient_faces(faces))
