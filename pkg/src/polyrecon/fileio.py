"""Scene and markup files (versioned JSON) plus OBJ mesh export.

Numbers serialize as Python's shortest round-trip decimals, so
parse(serialize(x)) is bit-exact.  Scene files carry face tags verbatim;
they are what lets a placement stamp elaboration metadata on a scene read
back from disk.
"""

import json

import numpy as np

from .errors import PolyreconError
from .geom import Face3, Plane3, Polygon2, Polyhedron, Scene
from .geom.base import snap_key
from .geom.polygon import point_in_ring, ring_area, ring_is_convex
from .markers import Marker, MarkerMeta, MarkupDescription

FORMAT_VERSION = "1"


class FileFormatError(PolyreconError):
    pass


def _jsonable_tag(tag):
    out = {}
    for k, v in (tag or {}).items():
        if isinstance(v, tuple):
            v = list(v)
        out[k] = v
    return out


def _tag_from_json(tag):
    out = dict(tag or {})
    if isinstance(out.get("base_face_ref"), list):
        out["base_face_ref"] = tuple(out["base_face_ref"])
    return out


def scene_to_dict(scene):
    polys = []
    for p in scene.polyhedra:
        faces = []
        for f in p.faces:
            faces.append({
                "rings": [[list(map(float, pt)) for pt in ring]
                          for ring in f.world_rings()],
                "tag": _jsonable_tag(f.tag),
            })
        polys.append({"faces": faces})
    return {"version": FORMAT_VERSION, "polyhedra": polys}


def dict_to_scene(data):
    if data.get("version") != FORMAT_VERSION:
        raise FileFormatError(f"unsupported scene version {data.get('version')!r}")
    if "polygons" in data:
        raise FileFormatError("2D polygon file where a 3D scene was expected")
    polys = []
    for p in data.get("polyhedra", []):
        faces = []
        for f in p["faces"]:
            rings = [np.array(r, dtype=float) for r in f["rings"]]
            faces.append(Face3.from_rings3d(rings, tag=_tag_from_json(f.get("tag"))))
        polys.append(Polyhedron(faces))
    return Scene(polys)


def polygons_to_dict(rings):
    return {"version": FORMAT_VERSION,
            "polygons": [[list(map(float, pt)) for pt in ring] for ring in rings]}


def dict_to_polygons(data):
    if data.get("version") != FORMAT_VERSION:
        raise FileFormatError(f"unsupported file version {data.get('version')!r}")
    return [np.array(r, dtype=float) for r in data.get("polygons", [])]


def markup_to_dict(markup):
    out = []
    for mid, m in markup.items():
        entry = {"id": mid, "kind": m.kind,
                 "position": list(map(float, m.position))}
        if m.plane is not None:
            entry["plane"] = {"normal": list(map(float, m.plane.normal)),
                              "offset": float(m.plane.offset)}
        if m.normal is not None:
            entry["normal"] = list(map(float, m.normal))
        meta = {}
        for k in ("face_id", "polyhedron_id", "elaboration_id", "order_index",
                  "in_plane_orientation"):
            v = getattr(m.meta, k)
            if v is not None:
                meta[k] = v
        if m.meta.base_face_ref is not None:
            meta["base_face_ref"] = list(m.meta.base_face_ref)
        if meta:
            entry["meta"] = meta
        out.append(entry)
    return {"version": FORMAT_VERSION, "markers": out}


def dict_to_markup(data):
    if data.get("version") != FORMAT_VERSION:
        raise FileFormatError(f"unsupported markup version {data.get('version')!r}")
    markers = {}
    for entry in data.get("markers", []):
        meta_d = dict(entry.get("meta", {}))
        if isinstance(meta_d.get("base_face_ref"), list):
            meta_d["base_face_ref"] = tuple(meta_d["base_face_ref"])
        meta = MarkerMeta(**meta_d)
        plane = None
        if "plane" in entry:
            plane = Plane3(np.array(entry["plane"]["normal"], dtype=float),
                           float(entry["plane"]["offset"]))
        normal = np.array(entry["normal"], dtype=float) if "normal" in entry else None
        markers[int(entry["id"])] = Marker(
            np.array(entry["position"], dtype=float), plane, normal, meta)
    return MarkupDescription(markers)


def save_json(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_scene(path, scene):
    save_json(path, scene_to_dict(scene))


def read_scene(path):
    return dict_to_scene(load_json(path))


def write_markup(path, markup):
    save_json(path, markup_to_dict(markup))


def read_markup(path):
    return dict_to_markup(load_json(path))


# ---------------------------------------------------------------------------
# OBJ export

def _bridge_holes(outer, holes, tau=1e-9):
    """Splice hole rings into the outer ring with visibility bridges."""
    from .geom.polygon import segments_properly_intersect

    ring = [np.asarray(p, float) for p in outer]
    remaining = [[np.asarray(p, float) for p in h] for h in holes]
    remaining.sort(key=lambda h: -max(p[0] for p in h))
    for hole in remaining:
        hi = max(range(len(hole)), key=lambda i: hole[i][0])
        m = hole[hi]
        best = None
        order = sorted(range(len(ring)),
                       key=lambda i: float(np.linalg.norm(ring[i] - m)))
        for i in order:
            p = ring[i]
            seg_ok = True
            all_rings = [ring] + remaining
            for r in all_rings:
                n = len(r)
                for j in range(n):
                    a, b = r[j], r[(j + 1) % n]
                    if segments_properly_intersect(m, p, a, b, tau):
                        seg_ok = False
                        break
                if not seg_ok:
                    break
            if seg_ok:
                best = i
                break
        if best is None:
            raise FileFormatError("cannot bridge a hole for triangulation")
        i = best
        ring = (ring[:i + 1]
                + hole[hi:] + hole[:hi + 1]
                + ring[i:])
    return ring


def _ear_clip(ring, tau=1e-9):
    """Triangulate a CCW simple ring (duplicate bridge vertices allowed)."""
    idx = list(range(len(ring)))
    tris = []

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10000:
            raise FileFormatError("ear clipping did not converge")
        found = False
        n = len(idx)
        for k in range(n):
            i0, i1, i2 = idx[(k - 1) % n], idx[k], idx[(k + 1) % n]
            a, b, c = ring[i0], ring[i1], ring[i2]
            if cross(a, b, c) <= tau:
                continue
            ok = True
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                p = ring[j]
                # duplicated bridge vertices coincide with corners; ignore them
                if min(np.linalg.norm(p - q) for q in (a, b, c)) <= tau:
                    continue
                if (cross(a, b, p) >= -tau and cross(b, c, p) >= -tau
                        and cross(c, a, p) >= -tau):
                    ok = False
                    break
            if ok:
                tris.append((i0, i1, i2))
                idx.pop(k)
                found = True
                break
        if not found:
            raise FileFormatError("no ear found; face polygon is degenerate")
    tris.append(tuple(idx))
    return tris


def triangulate_face(face, tau=1e-9):
    """World-space triangles covering the face, holes bridged then clipped."""
    poly = face.polygon
    outer = [p for p in poly.outer]
    ring = _bridge_holes(outer, poly.holes, tau) if poly.holes else outer
    ring = [np.asarray(p, float) for p in ring]
    tris = _ear_clip(ring, tau)
    out = []
    for (i, j, k) in tris:
        out.append((face.to_world(ring[i]), face.to_world(ring[j]),
                    face.to_world(ring[k])))
    return out


def export_obj(path, scene, tau=1e-9):
    """Triangulated OBJ; deterministic for a fixed input scene."""
    verts = []
    vindex = {}
    faces = []
    for pi, p in enumerate(scene.polyhedra):
        for f in p.faces:
            for tri in triangulate_face(f, tau):
                ids = []
                for pt in tri:
                    # vertex welding stays per solid so touching polyhedra
                    # remain separately watertight components
                    key = (pi,) + snap_key(pt, tau)
                    if key not in vindex:
                        vindex[key] = len(verts) + 1
                        verts.append(pt)
                    ids.append(vindex[key])
                if len(set(ids)) == 3:
                    faces.append(tuple(ids))
    with open(path, "w") as fh:
        fh.write("# polyrecon scene export\n")
        for v in verts:
            fh.write(f"v {v[0]!r} {v[1]!r} {v[2]!r}\n")
        for a, b, c in faces:
            fh.write(f"f {a} {b} {c}\n")
    return len(verts), len(faces)


def obj_is_watertight(path):
    """Every undirected edge must be used by exactly two triangles."""
    edges = {}
    nfaces = 0
    with open(path) as fh:
        for line in fh:
            if not line.startswith("f "):
                continue
            nfaces += 1
            ids = [int(x.split("/")[0]) for x in line.split()[1:]]
            for i in range(3):
                e = tuple(sorted((ids[i], ids[(i + 1) % 3])))
                edges[e] = edges.get(e, 0) + 1
    if nfaces == 0:
        return True
    return all(c == 2 for c in edges.values())
