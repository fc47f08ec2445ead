"""apx: headless driver for segmentation, extraction, solving and rendering.

Results go to stdout or --out; diagnostics are machine-readable JSON on
stderr; exit code 0 means no errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import ApxError


def _fail(exc: Exception) -> int:
    if isinstance(exc, ApxError):
        payload = exc.to_json()
    else:
        payload = {"error": type(exc).__name__, "message": str(exc), "details": {}}
    print(json.dumps(payload, sort_keys=True, default=str), file=sys.stderr)
    return 1


def _emit(doc, out: str | None):
    text = json.dumps(doc, indent=1, sort_keys=True, default=str)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _load_image(path):
    from ..vision.raster import RasterImage

    return RasterImage.open(path)


def _load_mask(path):
    from ..vision.raster import SegmentMask

    return SegmentMask.from_png(Path(path).read_bytes())


# subcommands ---------------------------------------------------------------

def cmd_segment(args) -> int:
    from ..vision.raster import BoxPrompt, PointPrompt
    from ..vision.segmentation import segment_region

    image = _load_image(args.image)
    prompts = []
    for spec in args.point or []:
        parts = spec.split(",")
        polarity = "negative" if len(parts) > 2 and parts[2] == "neg" else "positive"
        prompts.append(PointPrompt(int(parts[0]), int(parts[1]), polarity))
    box = None
    if args.box:
        box = BoxPrompt(*(int(v) for v in args.box.split(",")))
    mask = segment_region(image, prompts, box, tolerance=args.tolerance)
    Path(args.out).write_bytes(mask.to_png())
    _emit({"pixels": mask.pixel_count, "out": args.out}, None)
    return 0


def cmd_polygonize(args) -> int:
    from ..vision.contours import mask_to_contours, signed_area, simplify_contour
    from ..vision.decompose import convex_decompose

    mask = _load_mask(args.mask)
    contours = mask_to_contours(mask)
    outer = max(
        (c for c in contours if signed_area(c.points) > 0),
        key=lambda c: signed_area(c.points),
    )
    polygon = simplify_contour(outer, args.epsilon)
    pieces = convex_decompose(polygon)
    _emit(
        {
            "vertices": [[x, y] for x, y in polygon.vertices],
            "area": polygon.area,
            "pieces": [[[x, y] for x, y in p.vertices] for p in pieces],
        },
        args.out,
    )
    return 0


def cmd_skeleton(args) -> int:
    from ..vision.skeleton import skeleton_to_polyline, skeletonize

    mask = _load_mask(args.mask)
    skeleton = skeletonize(mask)
    line = skeleton_to_polyline(skeleton, prune_px=args.prune)
    _emit(
        {
            "points": [[x, y] for x, y in line.points],
            "closed": line.closed,
        },
        args.out,
    )
    return 0


def cmd_circuit(args) -> int:
    from ..circuit.netlist import Netlist, extract_netlist
    from ..circuit.solve import solve_dc
    from ..circuit.symbols import detect_symbols
    from ..vision.lines import detect_junctions, detect_lines

    if args.circuit_cmd == "extract":
        image = _load_image(args.image)
        annotations = None
        if args.annotations:
            annotations = json.loads(Path(args.annotations).read_text()).get("symbols")
        symbols = detect_symbols(image, annotations)
        lines = detect_lines(image)
        junctions = detect_junctions(lines)
        netlist = extract_netlist(symbols, lines, junctions)
        _emit(netlist.to_json(), args.out)
        return 0
    netlist = Netlist.from_json(json.loads(Path(args.netlist).read_text()))
    solution = solve_dc(netlist)
    _emit(solution.to_json(), args.out)
    return 0


def cmd_optics(args) -> int:
    from ..optics import solve_thin_lens, solve_mirror

    solver = solve_mirror if args.mirror else solve_thin_lens
    result = solver(args.do, args.f, args.ho)
    _emit(
        {
            "d_i": result.image_distance,
            "h_i": result.image_height,
            "m": result.magnification,
            "nature": result.nature,
        },
        args.out,
    )
    return 0


def cmd_simulate(args) -> int:
    from ..scene.build import (
        build_animation,
        build_circuit_netlist,
        build_kinematics_world,
        build_optics_scene,
    )
    from ..scene.persist import load_project
    from ..vision.raster import RasterImage
    from . import render

    project = load_project(Path(args.project).read_bytes())
    out: dict = {"sim_type": project.sim_type}

    if project.sim_type == "kinematics":
        world = build_kinematics_world(project)
        world.start()
        frames_dir = Path(args.render) if args.render else None
        if frames_dir:
            frames_dir.mkdir(parents=True, exist_ok=True)
        series = []
        recorder = None
        if args.record:
            recorder = project.create_recorder(args.record, window=10**9)
        for step in range(args.steps):
            world.step(world.timestep)
            if recorder is not None:
                head, _, key = args.record.partition(".")
                body = world.bodies.get(head)
                if body is not None:
                    value = {"x": body.px, "y": body.py, "angle": body.angle,
                             "vx": body.vx, "vy": body.vy}.get(key)
                    if value is not None:
                        series.append([world.time, value])
            if frames_dir and step % args.render_every == 0:
                arr = render.render_world_frame(project.page, world)
                path = frames_dir / f"frame_{step:05d}.png"
                path.write_bytes(RasterImage.from_array(arr).to_png())
        out["state"] = world.snapshot()
        if args.svg:
            Path(args.svg).write_text(render.world_svg(project.page, world))
        if recorder is not None:
            out["series"] = series
    elif project.sim_type == "optics":
        from ..optics import image_of, principal_rays

        obj, element = build_optics_scene(project)
        result, transform = image_of(obj, element)
        rays = principal_rays(obj, element)
        out["image"] = {
            "d_i": result.image_distance, "h_i": result.image_height,
            "m": result.magnification, "nature": result.nature,
        }
        if args.svg:
            Path(args.svg).write_text(render.rays_svg(project.page, rays))
    elif project.sim_type == "circuits":
        from ..circuit.solve import solve_dc

        netlist = build_circuit_netlist(project)
        out["netlist"] = netlist.to_json()
        out["solution"] = solve_dc(netlist).to_json()
    else:
        paths, tracks = build_animation(project)
        poses = {}
        from ..animation import track_pose

        t = args.steps / 60.0
        for track in tracks:
            pose = track_pose(track, paths[track.path_id], t)
            poses[track.object_id] = {"x": pose.x, "y": pose.y, "angle": pose.angle}
        out["poses"] = poses
        if args.svg:
            boxes = {eid: e.bbox for eid, e in project.entities.items()}
            Path(args.svg).write_text(
                render.animation_svg(project.page, paths, tracks, boxes)
            )
    _emit(out, args.out)
    return 0


def cmd_corpus(args) -> int:
    from .corpus import evaluate_corpus, generate_corpus

    if args.corpus_cmd == "generate":
        cases = generate_corpus(args.dir, args.category, args.n, args.seed)
        _emit({"generated": len(cases), "dir": str(args.dir)}, None)
        return 0
    report = evaluate_corpus(args.dir, args.category)
    _emit(report, args.report)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from ..service.app import create_app

    uvicorn.run(create_app(data_dir=args.data_dir), host=args.host, port=args.port,
                log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apx", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("segment", help="flood-fill segmentation from prompts")
    p.add_argument("--image", required=True)
    p.add_argument("--point", action="append", metavar="X,Y[,neg]")
    p.add_argument("--box", metavar="X0,Y0,X1,Y1")
    p.add_argument("--tolerance", type=float, default=32.0)
    p.add_argument("--out", required=True, help="mask PNG path")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("polygonize", help="mask to simplified polygon + convex pieces")
    p.add_argument("--mask", required=True)
    p.add_argument("--epsilon", type=float, default=2.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_polygonize)

    p = sub.add_parser("skeleton", help="mask to ordered path points")
    p.add_argument("--mask", required=True)
    p.add_argument("--prune", type=int, default=5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_skeleton)

    p = sub.add_parser("circuit", help="netlist extraction and DC solving")
    csub = p.add_subparsers(dest="circuit_cmd", required=True)
    pe = csub.add_parser("extract")
    pe.add_argument("--image", required=True)
    pe.add_argument("--annotations")
    pe.add_argument("--out")
    ps = csub.add_parser("solve")
    ps.add_argument("--netlist", required=True)
    ps.add_argument("--out")
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("optics", help="thin-lens / mirror solver")
    osub = p.add_subparsers(dest="optics_cmd", required=True)
    po = osub.add_parser("solve")
    po.add_argument("--f", type=float, required=True)
    po.add_argument("--do", type=float, required=True, dest="do")
    po.add_argument("--ho", type=float, default=1.0)
    po.add_argument("--mirror", action="store_true")
    po.add_argument("--out")
    p.set_defaults(func=cmd_optics)

    p = sub.add_parser("simulate", help="run a project headlessly")
    p.add_argument("project", help=".apx.json file")
    p.add_argument("--steps", type=int, default=120)
    p.add_argument("--render", help="directory for PNG frames")
    p.add_argument("--render-every", type=int, default=4)
    p.add_argument("--svg", help="write an SVG overlay")
    p.add_argument("--record", help="property path to record")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("corpus", help="synthetic corpus generation / evaluation")
    ksub = p.add_subparsers(dest="corpus_cmd", required=True)
    pg = ksub.add_parser("generate")
    pg.add_argument("--category", required=True,
                    choices=("kinematics", "optics", "circuits", "animation"))
    pg.add_argument("--n", type=int, default=20)
    pg.add_argument("--seed", type=int, required=True)
    pg.add_argument("--dir", required=True)
    pv = ksub.add_parser("evaluate")
    pv.add_argument("--category", required=True,
                    choices=("kinematics", "optics", "circuits", "animation"))
    pv.add_argument("--dir", required=True)
    pv.add_argument("--report")
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("serve", help="start the HTTP/WebSocket service")
    p.add_argument("--port", type=int, default=8763)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
