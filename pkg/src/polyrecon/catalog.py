"""Built-in counterexample instances witnessing the negative theorems.

Each instance is a marker set together with at least two fully consistent,
canonically distinct interpretations, plus the metadata addition that
collapses it to a unique one.  The instances use a pinwheel of three thin
triangular needles around a central triangle: the markers cannot tell
whether the central triangle is part of the scene, because its edges are
flush with the needles' inner edges.  Coordinates are fixed by construction
and every instance self-validates on load.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geom import Face3, Plane3, Polyhedron, Scene, orient_faces
from .markers import Marker, MarkerMeta, MarkupDescription
from .oracle import Marker2L


def _rot(v, ang):
    c, s = math.cos(ang), math.sin(ang)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def _line(p, d):
    d = np.asarray(d, float)
    d = d / np.linalg.norm(d)
    n = np.array([-d[1], d[0]])
    return (n, float(n @ np.asarray(p, float)), d)


def _isect(l1, l2):
    (n1, d1, _), (n2, d2, _) = l1, l2
    det = n1[0] * n2[1] - n1[1] * n2[0]
    if abs(det) < 1e-12:
        return None
    return np.array([(d1 * n2[1] - d2 * n1[1]) / det,
                     (n1[0] * d2 - n2[0] * d1) / det])


def _needle_pinwheel(radius, alpha_deg, ext):
    """Three thin needle triangles around a central triangle.

    Returns (needles, core, per-needle edge segments).  Needle k runs along
    side k of an equilateral triangle; its two long lines meet at an apex
    past the far corner; its base is cut by the previous needle's inner
    line, flush.  The core is the triangle of the three inner lines.
    """
    alpha = math.radians(alpha_deg)
    C = [np.array([math.cos(math.radians(90 + 120 * k)),
                   math.sin(math.radians(90 + 120 * k))]) * radius
         for k in range(3)]
    u = [(C[(k + 1) % 3] - C[k]) / np.linalg.norm(C[(k + 1) % 3] - C[k])
         for k in range(3)]
    apex = [C[(k + 1) % 3] + ext * u[k] for k in range(3)]
    lines = {}
    for k in range(3):
        for sgn in (+1, -1):
            lines[(k, sgn)] = _line(apex[k], _rot(u[k], sgn * alpha))
    # the inner line of each pair is the one closer to the centroid
    inner_sign = {}
    for k in range(3):
        d1 = abs(lines[(k, 1)][1]) / np.linalg.norm(lines[(k, 1)][0])
        d2 = abs(lines[(k, -1)][1]) / np.linalg.norm(lines[(k, -1)][0])
        inner_sign[k] = 1 if d1 < d2 else -1
    IN = inner_sign[0]
    needles = []
    for k in range(3):
        b1 = _isect(lines[(k, 1)], lines[((k - 1) % 3, IN)])
        b2 = _isect(lines[(k, -1)], lines[((k - 1) % 3, IN)])
        needles.append(np.array([apex[k], b1, b2]))
    core = np.array([_isect(lines[(0, IN)], lines[(1, IN)]),
                     _isect(lines[(1, IN)], lines[(2, IN)]),
                     _isect(lines[(2, IN)], lines[(0, IN)])])

    def ccw(ring):
        a = 0.0
        for i in range(len(ring)):
            a += ring[i][0] * ring[(i + 1) % 3][1] - ring[(i + 1) % 3][0] * ring[i][1]
        return ring if a > 0 else ring[::-1]

    needles = [ccw(t) for t in needles]
    core = ccw(core)
    return needles, core, lines, IN


def _edge_dir(a, b):
    d = b - a
    return d / np.linalg.norm(d)


def _marker_positions(needles, core, markers_per_edge=1):
    """2D point-line markers: one (or more) per needle edge; the inner long
    edge markers sit inside the core's edge span so they serve both."""
    core_pts = {tuple(np.round(p, 9)) for p in core}
    out = []
    for k, t in enumerate(needles):
        for i in range(3):
            a, b = t[i], t[(i + 1) % 3]
            d = _edge_dir(a, b)
            # does this edge run along a core edge? (same carrier)
            on_core = None
            for j in range(3):
                ca, cb = core[j], core[(j + 1) % 3]
                cd = _edge_dir(ca, cb)
                if abs(d[0] * cd[1] - d[1] * cd[0]) < 1e-9 and \
                        abs(np.cross(cd, a - ca)) < 1e-7:
                    on_core = (ca, cb, cd)
                    break
            if on_core is not None:
                ca, cb, cd = on_core
                lo = max(0.0, float(np.dot(ca - a, d)) if np.dot(cd, d) > 0
                         else float(np.dot(cb - a, d)))
                hi = min(float(np.dot(b - a, d)),
                         float(np.dot(cb - a, d)) if np.dot(cd, d) > 0
                         else float(np.dot(ca - a, d)))
            else:
                lo, hi = 0.0, float(np.dot(b - a, d))
            if hi - lo < 1e-6:
                # the edge only abuts the core edge (base chords share its
                # carrier line); any interior point of the edge works
                lo, hi = 0.0, float(np.dot(b - a, d))
            span = hi - lo
            for m in range(markers_per_edge):
                lam = (m + 1) / (markers_per_edge + 1)
                pos = a + d * (lo + span * lam)
                out.append((k, Marker2L((float(pos[0]), float(pos[1])),
                                        (float(d[0]), float(d[1])))))
    return out


def _prism(ring2, z0, z1, tag=None):
    """Upright prism over a CCW 2D ring."""
    n = len(ring2)
    bot = np.array([[p[0], p[1], z0] for p in ring2])[::-1]
    top = np.array([[p[0], p[1], z1] for p in ring2])
    faces = [Face3.from_rings3d([bot]), Face3.from_rings3d([top])]
    for i in range(n):
        a, b = ring2[i], ring2[(i + 1) % n]
        quad = np.array([[a[0], a[1], z0], [b[0], b[1], z0],
                         [b[0], b[1], z1], [a[0], a[1], z1]])
        faces.append(Face3.from_rings3d([quad]))
    poly = Polyhedron(orient_faces(faces))
    return poly


@dataclass
class CounterexampleInstance:
    name: str
    description: str
    markup: MarkupDescription          # 3D embedding (z = 0 plane markers)
    markers2d: list                    # Marker2L items
    witnesses: list                    # list of Scene (3D)
    witnesses2d: list                  # list of tuple-of-rings (2D) or None
    model_class: str
    resolution: str                    # which metadata collapses it
    resolved_markup: MarkupDescription # markup with that metadata added
    unique_scene_index: int            # witness surviving the metadata


def _lift_markup(tagged_markers, needles, core, with_core_witness, z0=0.0, z1=1.0,
                 markers_per_top=1):
    """3D markup for the prism lift: vertical planes for the 2D markers plus
    cap markers; core caps get markers on the shared boundary segment."""
    markers = []
    for k, m in tagged_markers:
        pos = np.array([m.position[0], m.position[1], (z0 + z1) / 2.0])
        d3 = np.array([m.direction[0], m.direction[1], 0.0])
        normal = np.array([-d3[1], d3[0], 0.0])
        plane = Plane3.from_point_normal(pos, normal)
        markers.append((k, Marker(pos, plane=plane,
                                  meta=MarkerMeta(polyhedron_id=k + 1))))
    for k, t in enumerate(needles):
        c = t.mean(axis=0)
        for z in (z0, z1):
            pos = np.array([c[0], c[1], z])
            plane = Plane3.from_point_normal(pos, np.array([0.0, 0.0, 1.0]))
            markers.append((k, Marker(pos, plane=plane,
                                      meta=MarkerMeta(polyhedron_id=k + 1))))
    # cap markers serving the (optional) core prism: on the segment shared
    # with needle k's inner edge; reuse the 2D inner-edge marker position
    for k, m in tagged_markers:
        pos2 = np.array(m.position)
        on_core_edge = False
        for j in range(3):
            ca, cb = core[j], core[(j + 1) % 3]
            cd = _edge_dir(ca, cb)
            if abs(np.cross(cd, pos2 - ca)) < 1e-7 and \
                    -1e-9 < float(np.dot(pos2 - ca, cd)) < float(np.dot(cb - ca, cd)) + 1e-9:
                on_core_edge = True
                break
        if on_core_edge:
            for z in (z0, z1):
                pos = np.array([pos2[0], pos2[1], z])
                plane = Plane3.from_point_normal(pos, np.array([0.0, 0.0, 1.0]))
                markers.append((k, Marker(pos, plane=plane,
                                          meta=MarkerMeta(polyhedron_id=k + 1))))
    plain = MarkupDescription.from_list([m for _, m in markers])
    tagged = MarkupDescription.from_list(
        [Marker(m.position, m.plane, m.normal, m.meta) for _, m in markers])
    return plain, tagged


def _strip_meta(markup):
    return MarkupDescription({
        mid: Marker(m.position, m.plane, m.normal, MarkerMeta())
        for mid, m in markup.markers.items()})


def _build_pinwheel_instance(name, description, radius, alpha_deg, ext,
                             markers_per_edge, resolution_note):
    needles, core, _, _ = _needle_pinwheel(radius, alpha_deg, ext)
    tagged = _marker_positions(needles, core, markers_per_edge)
    markers2d = [m for _, m in tagged]

    w_without = Scene([_prism(t, 0.0, 1.0) for t in needles])
    w_with = Scene([_prism(t, 0.0, 1.0) for t in needles]
                   + [_prism(core, 0.0, 1.0)])
    markup3d, markup_tagged = _lift_markup(tagged, needles, core, True)
    plain = _strip_meta(markup3d)
    return CounterexampleInstance(
        name=name,
        description=description,
        markup=plain,
        markers2d=markers2d,
        witnesses=[w_without, w_with],
        witnesses2d=[tuple(needles), tuple(needles) + (core,)],
        model_class="convex-polygon-set-2d",
        resolution=resolution_note,
        resolved_markup=markup_tagged,
        unique_scene_index=0,
    )


_CATALOG = None


def catalog():
    """The built-in counterexample instances (constructed once, validated
    by the test suite)."""
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = [
            _build_pinwheel_instance(
                "simpleAmbi-3d",
                "three needle prisms whose markers admit a phantom core "
                "prism; marker-per-face point-plane markup is ambiguous",
                radius=3.0, alpha_deg=5.0, ext=1.2, markers_per_edge=1,
                resolution_note="polyhedron_id"),
            _build_pinwheel_instance(
                "topo-equivalent-pair",
                "denser marker arrangement on a wider pinwheel; every "
                "member of both witnesses is a topological ball",
                radius=4.0, alpha_deg=7.0, ext=1.6, markers_per_edge=2,
                resolution_note="polyhedron_id"),
            _build_pinwheel_instance(
                "convex-polygon-slide",
                "the 2D pinwheel: non-intersecting convex polygons with one "
                "marker per edge, two fully consistent polygon sets",
                radius=3.0, alpha_deg=4.0, ext=1.0, markers_per_edge=1,
                resolution_note="polyhedron_id"),
        ]
    return _CATALOG


def instance(name):
    for inst in catalog():
        if inst.name == name:
            return inst
    raise KeyError(name)
