"""Command-line surface: place, reconstruct, roundtrip, ambiguity, export.

Exit codes: 0 success (and unique interpretations for `ambiguity`), 1
roundtrip FAIL, 2 file/parse errors, 3 placement or degenerate-input errors,
4 reconstruction errors (the typed error name goes to standard error), 5
ambiguous markup (a finding, not an error), 6 search budget exceeded.
Diagnostics are line-oriented `LEVEL: message` on standard error.
"""

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import catalog as catalog_mod
from . import fileio
from .errors import (PlacementError, PolyreconError, ReconstructionError,
                     SearchBudgetExceeded, GeometryError, MarkupError)
from .geom import Scene, scene_diff, scenes_equal
from .markers import POINT, POINT_NORMAL, POINT_PLANE, group_by
from .oracle import (CandidateSpace, CONVEX_3D, CONVEX_POLYGON_SET_2D,
                     ORTHOGONAL_POLYHEDRON, RECT_SET_2D, enumerate_consistent)
from .placement import PlacementPolicy, place_dense, place_per_face, place_vertices
from .recon import convex as rc
from .recon import dense as rd
from .recon import elaboration as re_
from .recon import rect2d as rr
from .recon import vertex as rv

EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_PLACE = 3
EXIT_RECON = 4
EXIT_AMBIGUOUS = 5
EXIT_BUDGET = 6


def _err(level, message):
    print(f"{level}: {message}", file=sys.stderr)


def _read_scene(path):
    try:
        return fileio.read_scene(path)
    except (OSError, json.JSONDecodeError, fileio.FileFormatError, KeyError) as exc:
        _err("ERROR", f"cannot read scene {path}: {exc}")
        raise SystemExit(EXIT_PARSE)


def _read_markup(path):
    try:
        return fileio.read_markup(path)
    except (OSError, json.JSONDecodeError, fileio.FileFormatError, KeyError) as exc:
        _err("ERROR", f"cannot read markup {path}: {exc}")
        raise SystemExit(EXIT_PARSE)


def _place(scene, args):
    meta = set(args.meta or [])
    policy = PlacementPolicy(
        mode=args.mode, markers_per_face=args.per_face, seed=args.seed,
        emit_polyhedron_ids="ids" in meta,
        emit_face_ids="face-ids" in meta or "elab" in meta,
        emit_elaboration="elab" in meta)
    try:
        if args.strategy == "per-face":
            return place_per_face(scene, policy, args.data)
        if args.strategy == "dense":
            return place_dense(scene, args.spacing)
        if args.strategy == "vertex":
            return place_vertices(scene, with_face_ids="face-ids" in meta or "order" in meta,
                                  with_order="order" in meta)
    except (PlacementError, GeometryError, ValueError) as exc:
        _err("ERROR", f"{type(exc).__name__}: {exc}")
        raise SystemExit(EXIT_PLACE)
    raise SystemExit(EXIT_PARSE)


def cmd_place(args):
    scene = _read_scene(args.scene)
    markup = _place(scene, args)
    fileio.write_markup(args.out, markup)
    _err("INFO", f"wrote {len(markup)} markers to {args.out}")
    return 0


def _markup_to_rect_markers(markup):
    ms = []
    for mid, m in markup.items():
        if m.kind != POINT_NORMAL or abs(m.normal[2]) > 1e-9:
            raise ReconstructionError("rect2d engine needs z=0 point-normal markers")
        cls = rr.classify_normal_2d(m.normal[:2])
        if cls is None:
            from .errors import NoConsistentSeed
            raise NoConsistentSeed("markers must carry axis-aligned normals")
        ms.append(rr.Marker2N((float(m.position[0]), float(m.position[1])), cls))
    return ms


def _markup_to_vertex_records(markup):
    return [rv.VertexRecord(tuple(map(float, m.position)), m.meta.face_id,
                            m.meta.order_index)
            for _, m in markup.items()]


def _auto_engine(markup):
    kinds = {m.kind for m in markup.values()}
    has_ids = all(m.meta.polyhedron_id is not None for m in markup.values())
    has_elab = any(m.meta.elaboration_id is not None for m in markup.values())
    if has_elab and has_ids:
        return "elab"
    if has_ids:
        return "convex-multi"
    if kinds == {POINT_NORMAL}:
        return "box-pn"
    return "convex"


def _reconstruct(markup, engine):
    if engine == "auto":
        engine = _auto_engine(markup)
        _err("INFO", f"auto engine: {engine}")
    if engine == "convex":
        return Scene([rc.reconstruct_convex(markup)])
    if engine == "convex-multi":
        return rc.reconstruct_convex_multi(markup)
    if engine == "rect2d":
        rects = rr.reconstruct_rects(_markup_to_rect_markers(markup))
        rings = [np.array([[r.x0, r.y0], [r.x1, r.y0], [r.x1, r.y1], [r.x0, r.y1]])
                 for r in rects.rectangles]
        return rings
    if engine == "elab":
        return re_.reconstruct_hierarchy(markup)
    if engine == "elab-nonconvex":
        return re_.reconstruct_hierarchy_nonconvex(markup)
    if engine == "elab-rect":
        return re_.reconstruct_rect_elab_multi(markup)
    if engine == "box-pn":
        return Scene([re_.reconstruct_box_intrusions_pn(markup)])
    if engine == "box-pp":
        return Scene([re_.reconstruct_box_intrusions_pp(markup)])
    if engine == "dense":
        return rd.reconstruct_dense(markup)
    if engine == "vertex-hulls":
        return rv.faces_from_hulls(_markup_to_vertex_records(markup))
    if engine == "vertex-ordered":
        return rv.faces_from_ordered(_markup_to_vertex_records(markup))
    if engine == "vertex-dots":
        poly = rv.connect_dots_3d([m.position for m in markup.values()])
        return Scene([poly])
    raise SystemExit(EXIT_PARSE)


def cmd_reconstruct(args):
    markup = _read_markup(args.markup)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            result = _reconstruct(markup, args.engine)
    except (ReconstructionError, GeometryError, MarkupError) as exc:
        _err("ERROR", f"{type(exc).__name__}: {exc}")
        raise SystemExit(EXIT_RECON)
    if isinstance(result, Scene):
        fileio.write_scene(args.out, result)
        _err("INFO", f"wrote scene with {len(result.polyhedra)} polyhedra to {args.out}")
    else:
        fileio.save_json(args.out, fileio.polygons_to_dict(result))
        _err("INFO", f"wrote {len(result)} polygons to {args.out}")
    return 0


def cmd_roundtrip(args):
    scene = _read_scene(args.scene)
    markup = _place(scene, args)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rec = _reconstruct(markup, args.engine)
    except (ReconstructionError, GeometryError, MarkupError) as exc:
        print(f"FAIL: reconstruction refused ({type(exc).__name__}: {exc})")
        return EXIT_FAIL
    if not isinstance(rec, Scene):
        print("FAIL: engine produced a 2D result for a 3D scene")
        return EXIT_FAIL
    if scenes_equal(rec, scene):
        print("PASS")
        return 0
    print("FAIL")
    print(scene_diff(scene, rec))
    return EXIT_FAIL


_CLASSES = {"rect-set-2d": RECT_SET_2D, "convex-polygon-set-2d": CONVEX_POLYGON_SET_2D,
            "convex-3d": CONVEX_3D, "orthogonal-polyhedron": ORTHOGONAL_POLYHEDRON}


def cmd_ambiguity(args):
    markup = _read_markup(args.markup)
    space = CandidateSpace(_CLASSES[args.model_class], budget=args.budget)
    try:
        found = enumerate_consistent(markup, space)
    except SearchBudgetExceeded as exc:
        _err("ERROR", f"SearchBudgetExceeded: {exc}")
        return EXIT_BUDGET
    except (ValueError, PolyreconError) as exc:
        _err("ERROR", f"{type(exc).__name__}: {exc}")
        return EXIT_RECON
    n = len(found)
    print(f"{n} interpretation{'s' if n != 1 else ''}")
    if args.out_prefix:
        for i, w in enumerate(found):
            path = f"{args.out_prefix}-{i}.json"
            if isinstance(w, Scene):
                fileio.write_scene(path, w)
            elif space.model_class == RECT_SET_2D:
                rings = [np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
                         for (x0, y0, x1, y1) in w]
                fileio.save_json(path, fileio.polygons_to_dict(rings))
            else:
                fileio.save_json(path, fileio.polygons_to_dict(list(w)))
            _err("INFO", f"wrote witness {path}")
    return EXIT_AMBIGUOUS if n >= 2 else 0


def cmd_export(args):
    scene = _read_scene(args.scene)
    try:
        nv, nf = fileio.export_obj(args.out, scene)
    except fileio.FileFormatError as exc:
        _err("ERROR", f"{type(exc).__name__}: {exc}")
        raise SystemExit(EXIT_PLACE)
    _err("INFO", f"wrote {nv} vertices, {nf} triangles to {args.out}")
    return 0


def cmd_catalog(args):
    os.makedirs(args.out_dir, exist_ok=True)
    for inst in catalog_mod.catalog():
        base = os.path.join(args.out_dir, inst.name)
        fileio.write_markup(base + ".markup.json", inst.markup)
        for i, w in enumerate(inst.witnesses):
            fileio.write_scene(f"{base}.witness-{i}.scene.json", w)
        fileio.write_markup(base + ".resolved.markup.json", inst.resolved_markup)
        _err("INFO", f"wrote {inst.name} ({len(inst.witnesses)} witnesses)")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="polyrecon",
                                 description="markup placement and polyhedral "
                                             "scene reconstruction")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_place_flags(p):
        p.add_argument("--strategy", choices=["per-face", "dense", "vertex"],
                       default="per-face")
        p.add_argument("--data", choices=[POINT, POINT_PLANE, POINT_NORMAL],
                       default=POINT_PLANE)
        p.add_argument("--meta", action="append",
                       choices=["ids", "elab", "order", "face-ids"], default=[])
        p.add_argument("--mode", choices=["centroid", "random-interior"],
                       default="centroid")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--spacing", type=float, default=0.25)
        p.add_argument("--per-face", type=int, default=1)

    p = sub.add_parser("place", help="scene file -> markup file")
    p.add_argument("scene")
    p.add_argument("out")
    add_place_flags(p)
    p.set_defaults(func=cmd_place)

    engines = ["convex", "convex-multi", "rect2d", "elab", "elab-nonconvex",
               "elab-rect", "box-pn", "box-pp", "dense", "vertex-hulls",
               "vertex-ordered", "vertex-dots", "auto"]
    p = sub.add_parser("reconstruct", help="markup file -> scene file")
    p.add_argument("markup")
    p.add_argument("out")
    p.add_argument("--engine", choices=engines, default="auto")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("roundtrip", help="place then reconstruct and compare")
    p.add_argument("scene")
    p.add_argument("--engine", choices=engines, default="auto")
    add_place_flags(p)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("ambiguity", help="enumerate consistent interpretations")
    p.add_argument("markup")
    p.add_argument("--class", dest="model_class", choices=sorted(_CLASSES),
                   default="convex-3d")
    p.add_argument("--budget", type=int, default=10 ** 6)
    p.add_argument("--out-prefix", default=None)
    p.set_defaults(func=cmd_ambiguity)

    p = sub.add_parser("export", help="scene file -> OBJ mesh")
    p.add_argument("scene")
    p.add_argument("out")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("catalog", help="write the counterexample catalog")
    p.add_argument("out_dir")
    p.set_defaults(func=cmd_catalog)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except PolyreconError as exc:
        _err("ERROR", f"{type(exc).__name__}: {exc}")
        return EXIT_RECON


if __name__ == "__main__":
    sys.exit(main())
