import math

import numpy as np
import pytest

from polyrecon.errors import MissingKey
from polyrecon.geom import Plane3, Scene, make_box
from polyrecon.markers import (Marker, MarkerMeta, MarkupDescription, group_by,
                               normalize, validate)
from polyrecon.placement import PlacementPolicy, place_per_face


def cube_markup():
    return place_per_face(Scene([make_box((0, 0, 0), (1, 1, 1))]),
                          PlacementPolicy(emit_polyhedron_ids=True,
                                          emit_face_ids=True), "point-plane")


def test_validate_clean_cube():
    assert validate(cube_markup()) == []


def test_validate_off_plane():
    plane = Plane3(np.array([0.0, 0.0, 1.0]), 0.0)
    d = MarkupDescription.from_list([Marker(np.array([0.0, 0.0, 0.1]), plane=plane)])
    diags = validate(d)
    assert any(x.code == "OffPlane" for x in diags)


def test_validate_duplicate_order():
    meta = MarkerMeta(face_id=1, order_index=0)
    d = MarkupDescription.from_list([
        Marker(np.array([0.0, 0, 0]), meta=meta),
        Marker(np.array([1.0, 0, 0]), meta=meta)])
    assert any(x.code == "DuplicateOrder" for x in validate(d))


def test_validate_dangling_base_face_ref():
    d = MarkupDescription.from_list([
        Marker(np.array([0.0, 0, 0]), meta=MarkerMeta(base_face_ref=(1, 2)))])
    assert any(x.code == "DanglingBaseFaceRef" for x in validate(d))


def test_normalize_snaps_axis():
    n = np.array([0.999, 0.0, 0.0447])
    d = MarkupDescription.from_list([Marker(np.array([1.0, 0, 0]), normal=n)])
    out = normalize(d, snap_axis=True, tau_snap=math.radians(3.0))
    got = out.markers[0].normal
    assert np.allclose(got, [1.0, 0.0, 0.0])


def test_normalize_identity_when_off():
    d = cube_markup()
    out = normalize(d)
    assert all(np.allclose(out.markers[i].position, d.markers[i].position)
               for i in d.ids())


def test_normalize_merges_coplanar_group():
    p1 = Plane3(np.array([0.0, 0.0, 1.0]), 0.0)
    p2 = Plane3(np.array([0.0, 0.0, 1.0]), 0.001)
    d = MarkupDescription.from_list([
        Marker(np.array([0.0, 0, 0]), plane=p1, meta=MarkerMeta(face_id=7)),
        Marker(np.array([1.0, 0, 0.001]), plane=p2, meta=MarkerMeta(face_id=7))])
    out = normalize(d, merge_coplanar=True)
    offs = {round(m.plane.offset, 12) for m in out.markers.values()}
    assert offs == {0.0005}
    for m in out.markers.values():
        assert abs(m.plane.signed_distance(m.position)) < 1e-12


def test_normalize_idempotent():
    n = np.array([0.999, 0.0, 0.0447])
    d = MarkupDescription.from_list([Marker(np.array([1.0, 0, 0]), normal=n)])
    once = normalize(d, snap_axis=True)
    twice = normalize(once, snap_axis=True)
    assert np.allclose(once.markers[0].normal, twice.markers[0].normal)
    assert np.allclose(once.markers[0].position, twice.markers[0].position)


def test_group_by_partition():
    d = cube_markup()
    groups = group_by(d, "polyhedron")
    assert sorted(sum(groups.values(), [])) == d.ids()
    fgroups = group_by(d, "face")
    assert len(fgroups) == 6


def test_group_by_missing_key():
    d = MarkupDescription.from_list([Marker(np.array([0.0, 0, 0]))])
    with pytest.raises(MissingKey):
        group_by(d, "polyhedron")
