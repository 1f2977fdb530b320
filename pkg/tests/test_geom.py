import math
import random

import numpy as np
import pytest

from polyrecon.errors import (Degenerate, DegenerateRegion, Empty,
                              InvalidTopology, SplitSides, Unbounded)
from polyrecon.geom import (Face3, HalfSpace3, Line2, Plane3, Polygon2,
                            Polyhedron, Scene, build_arrangement, canonicalize,
                            inscribed_radius, intersect_halfspaces, is_convex,
                            is_orthogonal, make_box, orient_faces,
                            polyhedra_equal, side_containing)

from helpers import random_convex_polytope


def box_halfspaces():
    hs = []
    for axis in range(3):
        n = np.zeros(3)
        n[axis] = 1.0
        hs.append(HalfSpace3(Plane3(n.copy(), 1.0), +1))
        hs.append(HalfSpace3(Plane3(n.copy(), 0.0), -1))
    return hs


def test_side_containing_strictly_above():
    p = Plane3(np.array([0.0, 0.0, 1.0]), 0.0)
    hs = side_containing(p, [np.array([0, 0, 1.0]), np.array([1, 1, 2.0])])
    assert hs.side == -1 and not hs.degenerate
    assert hs.contains(np.array([0, 0, 5.0]))


def test_side_containing_on_plane_degenerate():
    p = Plane3(np.array([0.0, 0.0, 1.0]), 0.0)
    hs = side_containing(p, [np.array([0.0, 0.0, 0.0])])
    assert hs.side == +1 and hs.degenerate


def test_side_containing_split():
    p = Plane3(np.array([0.0, 0.0, 1.0]), 0.0)
    with pytest.raises(SplitSides):
        side_containing(p, [np.array([0, 0, 1.0]), np.array([0, 0, -1.0])])


def test_intersect_halfspaces_unit_cube():
    cube = intersect_halfspaces(box_halfspaces())
    cube.validate()
    assert len(cube.faces) == 6
    assert len(cube.world_vertices()) == 8
    assert cube.edge_count() == 12
    assert abs(cube.signed_volume() - 1.0) < 1e-12


def test_intersect_halfspaces_simplex():
    hs = [HalfSpace3(Plane3(np.array([1.0, 0, 0]), 0.0), -1),
          HalfSpace3(Plane3(np.array([0, 1.0, 0]), 0.0), -1),
          HalfSpace3(Plane3(np.array([0, 0, 1.0]), 0.0), -1),
          HalfSpace3(Plane3(np.array([1.0, 1, 1]) / math.sqrt(3),
                            1 / math.sqrt(3)), +1)]
    tet = intersect_halfspaces(hs)
    tet.validate()
    got = sorted(tuple(round(c, 9) for c in v) for v in tet.world_vertices())
    assert got == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_intersect_halfspaces_open_top_unbounded():
    with pytest.raises(Unbounded):
        intersect_halfspaces(box_halfspaces()[:5])


def test_intersect_halfspaces_empty():
    p = Plane3(np.array([0.0, 0.0, 1.0]), 0.0)
    with pytest.raises((Empty, Degenerate)):
        intersect_halfspaces(box_halfspaces()
                             + [HalfSpace3(Plane3(np.array([0, 0, 1.0]), 2.0), -1)])


def test_canonicalize_merges_split_face():
    cube = intersect_halfspaces(box_halfspaces())
    top = next(f for f in cube.faces if abs(f.plane.normal[2] - 1) < 1e-9)
    others = [f for f in cube.faces if f is not top]
    r1 = np.array([[0, 0, 1], [1, 0, 1], [1, 0.5, 1], [0, 0.5, 1]], float)
    r2 = np.array([[0, 0.5, 1], [1, 0.5, 1], [1, 1, 1], [0, 1, 1]], float)
    split = Polyhedron(others + [Face3.from_rings3d([r1]), Face3.from_rings3d([r2])])
    split.validate()
    assert len(canonicalize(split).faces) == 6
    assert polyhedra_equal(split, cube)


def test_canonicalize_idempotent_and_ring_invariance():
    cube = intersect_halfspaces(box_halfspaces())
    c1 = canonicalize(cube)
    assert polyhedra_equal(c1, canonicalize(c1))
    rot = Polyhedron([Face3.from_rings3d([np.roll(f.world_rings()[0], 2, axis=0)])
                      for f in cube.faces[::-1]])
    assert polyhedra_equal(rot, cube)


def tunnel_cube():
    i0, i1 = 0.3, 0.7
    R = lambda pts: np.array(pts, float)
    faces = [
        Face3.from_rings3d([R([(0, 0, 0), (0, 1, 0), (1, 1, 0), (1, 0, 0)]),
                            R([(i0, i0, 0), (i1, i0, 0), (i1, i1, 0), (i0, i1, 0)])]),
        Face3.from_rings3d([R([(0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)]),
                            R([(i0, i0, 1), (i0, i1, 1), (i1, i1, 1), (i1, i0, 1)])]),
        Face3.from_rings3d([R([(0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 0, 1)])]),
        Face3.from_rings3d([R([(1, 0, 0), (1, 1, 0), (1, 1, 1), (1, 0, 1)])]),
        Face3.from_rings3d([R([(1, 1, 0), (0, 1, 0), (0, 1, 1), (1, 1, 1)])]),
        Face3.from_rings3d([R([(0, 1, 0), (0, 0, 0), (0, 0, 1), (0, 1, 1)])]),
        Face3.from_rings3d([R([(i0, i0, 0), (i0, i1, 0), (i0, i1, 1), (i0, i0, 1)])]),
        Face3.from_rings3d([R([(i1, i0, 0), (i1, i0, 1), (i1, i1, 1), (i1, i1, 0)])]),
        Face3.from_rings3d([R([(i0, i0, 0), (i0, i0, 1), (i1, i0, 1), (i1, i0, 0)])]),
        Face3.from_rings3d([R([(i0, i1, 0), (i1, i1, 0), (i1, i1, 1), (i0, i1, 1)])]),
    ]
    return Polyhedron(orient_faces(faces))


def test_genus_one_tunnel():
    tun = tunnel_cube()
    tun.validate()
    assert tun.euler_characteristic() == 0
    assert tun.genus() == 1
    assert abs(tun.signed_volume() - (1 - 0.4 * 0.4)) < 1e-12
    assert not is_convex(tun)
    assert is_orthogonal(Scene([tun]))


def test_predicates_cube_and_tetra():
    cube = make_box((0, 0, 0), (1, 1, 1))
    assert is_convex(cube) and is_orthogonal(Scene([cube]))
    hs = [HalfSpace3(Plane3(np.array([1.0, 0, 0]), 0.0), -1),
          HalfSpace3(Plane3(np.array([0, 1.0, 0]), 0.0), -1),
          HalfSpace3(Plane3(np.array([0, 0, 1.0]), 0.0), -1),
          HalfSpace3(Plane3(np.array([1.0, 1, 1]) / math.sqrt(3),
                            1 / math.sqrt(3)), +1)]
    tet = intersect_halfspaces(hs)
    assert is_convex(tet) and not is_orthogonal(Scene([tet]))


def test_arrangement_cross():
    arr = build_arrangement([Line2((1.0, 0.0), 0.0), Line2((0.0, 1.0), 0.0)],
                            (-1, -1, 1, 1))
    assert len(arr.regions) == 4
    assert all(abs(r.area() - 1.0) < 1e-9 for r in arr.regions)


def test_arrangement_empty_and_triangle():
    assert len(build_arrangement([], (-1, -1, 1, 1)).regions) == 1
    arr = build_arrangement([Line2.from_points((0, 0), (1, 0.2)),
                             Line2.from_points((0, 1), (1, -0.5)),
                             Line2.from_points((-0.5, -1), (0.3, 1))],
                            (-3, -3, 3, 3))
    # three generic lines cut the box into 7 cells; one is the inner triangle
    assert len(arr.regions) == 7
    assert len(arr.bounded_regions()) == 1


def test_arrangement_area_conservation():
    rng = random.Random(5)
    lines = [Line2.from_points((rng.uniform(-1, 1), rng.uniform(-1, 1)),
                               (rng.uniform(-1, 1), rng.uniform(-1, 1)))
             for _ in range(6)]
    arr = build_arrangement(lines, (-2, -2, 2, 2))
    assert abs(sum(r.area() for r in arr.regions) - 16.0) < len(lines) * 1e-6


def test_inscribed_radius_examples():
    assert abs(inscribed_radius(Polygon2([(0, 0), (1, 0), (1, 1), (0, 1)])) - 0.5) < 1e-9
    assert abs(inscribed_radius(Polygon2([(0, 0), (2, 0), (2, 1), (0, 1)])) - 0.5) < 1e-9
    # right triangle with legs a, b: r = (a + b - c) / 2
    a, b = 3.0, 4.0
    c = math.hypot(a, b)
    expected = (a + b - c) / 2
    assert abs(inscribed_radius(Polygon2([(0, 0), (a, 0), (0, b)])) - expected) < 1e-9


def test_inscribed_radius_degenerate():
    with pytest.raises(DegenerateRegion):
        inscribed_radius(Polygon2([(0, 0), (1, 0), (2, 0)]))


def test_random_convex_intersections_are_convex():
    rng = random.Random(2)
    for _ in range(10):
        poly = random_convex_polytope(rng, rng.randint(4, 20))
        poly.validate()
        assert is_convex(poly)
        assert poly.genus() == 0


def test_validate_rejects_open_solid():
    cube = make_box((0, 0, 0), (1, 1, 1))
    with pytest.raises(InvalidTopology):
        Polyhedron(cube.faces[:5]).validate()
