import random

import numpy as np
import pytest

from polyrecon.geom import Scene, make_box
from polyrecon.markers import validate
from polyrecon.placement import (PlacementPolicy, compute_epsilon_min,
                                 place_dense, place_per_face, place_vertices)

from helpers import random_convex_polytope


def test_centroid_markers_on_cube_faces():
    cube = make_box((0, 0, 0), (1, 1, 1))
    mk = place_per_face(Scene([cube]), PlacementPolicy(), "point-plane")
    assert len(mk) == 6
    positions = {tuple(np.round(m.position, 9)) for m in mk.values()}
    assert (0.5, 0.5, 1.0) in positions
    assert validate(mk) == []


def test_markers_lie_on_faces_with_outward_normals():
    rng = random.Random(4)
    for _ in range(10):
        poly = random_convex_polytope(rng, rng.randint(4, 14))
        scene = Scene([poly])
        mk = place_per_face(scene, PlacementPolicy(mode="random-interior",
                                                   seed=1, markers_per_face=2),
                            "point-normal")
        assert len(mk) == 2 * len(poly.faces)
        inner = np.mean(poly.world_vertices(), axis=0)
        for m in mk.values():
            assert any(f.contains_point(m.position, 1e-7) for f in poly.faces)
            # outward: normal points away from an interior point
            assert float(np.dot(m.normal, m.position - inner)) > 0


def test_dense_coverage_monte_carlo():
    cube = make_box((0, 0, 0), (1, 1, 1))
    scene = Scene([cube])
    d = 0.35
    mk = place_dense(scene, d)
    pos = np.array([m.position for m in mk.values()])
    rng = random.Random(0)
    for _, face in scene.all_faces():
        for _ in range(400):
            u = rng.uniform(0, 1)
            v = rng.uniform(0, 1)
            p = face.to_world(face.polygon.outer[0]
                              + u * (face.polygon.outer[1] - face.polygon.outer[0])
                              + v * (face.polygon.outer[3] - face.polygon.outer[0]))
            dist = np.linalg.norm(pos - p, axis=1).min()
            assert dist <= d + 1e-9


def test_dense_one_marker_suffices_for_wide_spacing():
    cube = make_box((0, 0, 0), (1, 1, 1))
    mk = place_dense(Scene([cube]), 1.0)
    # a covering set exists; every face point is within 1.0 of some marker
    pos = np.array([m.position for m in mk.values()])
    corner = np.array([0.0, 0.0, 1.0])
    assert np.linalg.norm(pos - corner, axis=1).min() <= 1.0


def test_dense_empty_scene():
    assert len(place_dense(Scene([]), 0.5)) == 0


def test_epsilon_min_cube():
    eps = compute_epsilon_min(Scene([make_box((0, 0, 0), (1, 1, 1))]))
    assert abs(eps - 0.5) < 1e-6


def test_epsilon_min_slab():
    # 1x1x3 slab: square caps still admit the 0.5-disk; long walls are cut
    # into 1x3 cells whose inscribed radius is also 0.5
    eps = compute_epsilon_min(Scene([make_box((0, 0, 0), (1, 1, 3))]))
    assert abs(eps - 0.5) < 1e-6


def test_epsilon_min_thin_cell():
    # a plane cutting 0.1 from a cube edge creates a thin 0.1-wide cell
    from polyrecon.recon.elaboration import (Elaboration, ElaborationTree,
                                             INTRUSION, apply_elaborations)
    cube = make_box((0, 0, 0), (1, 1, 1))
    top_i = next(i for i, f in enumerate(cube.faces)
                 if abs(f.plane.normal[2] - 1) < 1e-9)
    top = cube.faces[top_i]
    c = top.polygon.outer.mean(axis=0)
    prof = np.array([c + [-0.4, -0.4], c + [0.4, -0.4],
                     c + [0.4, 0.4], c + [-0.4, 0.4]])
    scene = apply_elaborations(ElaborationTree(
        [(1, cube)], [Elaboration(5, INTRUSION, top_i, prof, 0.3)]))
    eps = compute_epsilon_min(scene)
    assert eps <= 0.05 + 1e-9


def test_place_vertices_counts():
    cube = make_box((0, 0, 0), (1, 1, 1))
    bare = place_vertices(Scene([cube]))
    assert len(bare) == 8
    recs = place_vertices(Scene([cube]), with_face_ids=True, with_order=True)
    assert len(recs) == 24  # three (vertex, face) records per corner
    orders = {m.meta.face_id: [] for m in recs.values()}
    for m in recs.values():
        orders[m.meta.face_id].append(m.meta.order_index)
    assert all(sorted(v) == [0, 1, 2, 3] for v in orders.values())
