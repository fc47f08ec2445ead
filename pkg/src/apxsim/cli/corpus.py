"""Synthetic diagram corpus with exact ground truth, per simulation category.

Each case regenerates byte-identically from its seed. Evaluation replays the
detection pipeline against the generator's ground truth and reports per-stage
success rates (segmentation / polygon / placement / simulation rows for
kinematics; line detection / symbol recognition / simulation rows for
circuits, and so on).
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from ..circuit.mesh import solve_dc_mesh
from ..circuit.netlist import Component, Netlist, extract_netlist
from ..circuit.solve import solve_dc
from ..circuit.symbols import detect_symbols
from ..kinematics.body import build_body
from ..animation import AnimationTrack, parametrize, track_pose
from ..optics import solve_thin_lens
from ..vision.contours import mask_to_contours, signed_area, simplify_contour
from ..vision.decompose import convex_decompose
from ..vision.lines import detect_junctions, detect_lines
from ..vision.raster import PointPrompt, RasterImage, SegmentMask, bounding_box
from ..vision.segmentation import segment_region
from ..vision.skeleton import skeleton_to_polyline, skeletonize
from ..kinematics.world import World
from . import draw

CATEGORIES = ("kinematics", "optics", "circuits", "animation")

R_VALUES = (10.0, 22.0, 47.0, 100.0, 220.0, 330.0, 470.0)
V_VALUES = (3.0, 4.5, 6.0, 9.0, 12.0)


def _write_png(path: Path, arr: np.ndarray):
    path.write_bytes(RasterImage.from_array(arr).to_png())


# --------------------------------------------------------------------------
# circuits
# --------------------------------------------------------------------------

def _gen_circuit_case(rng: np.random.Generator):
    """One rectangle-loop circuit; returns (page array, truth dict, ann dict)."""
    arr = draw.canvas(320, 240)
    x0, y0, x1, y1 = 40, 40, 280, 200
    template = int(rng.integers(0, 4))

    symbols = []   # dicts: kind, value, bbox, plus, net_a, net_b
    wires = []     # (p0, p1, net) straight drawn wire runs

    def wire(p0, p1, net):
        draw.draw_line(arr, p0, p1, thickness=2)
        wires.append((p0, p1, net))

    def add_battery(net_top, net_bottom):
        value = float(rng.choice(V_VALUES))
        cy = (y0 + y1) / 2
        bbox, plus = draw.draw_battery(arr, x0, cy, vertical_plates=False, plus_first=True)
        wire((x0, y0), (x0, bbox[1]), net_top)
        wire((x0, bbox[3]), (x0, y1), net_bottom)
        symbols.append({
            "kind": "battery", "value": value, "unit": "volt", "bbox": list(bbox),
            "plus": [plus[0], plus[1]], "net_a": net_top, "net_b": net_bottom,
        })

    def add_resistor_h(y, xa, xb, net_left, net_right):
        value = float(rng.choice(R_VALUES))
        length = 60
        zx = (xa + xb) / 2 - length / 2
        bbox = draw.draw_zigzag(arr, zx, y, length=length, amp=7)
        wire((xa, y), (zx - 1, y), net_left)
        wire((zx + length + 1, y), (xb, y), net_right)
        symbols.append({
            "kind": "resistor", "value": value, "unit": "ohm", "bbox": list(bbox),
            "plus": None, "net_a": net_left, "net_b": net_right,
        })

    def add_resistor_v(x, ya, yb, net_top, net_bottom):
        value = float(rng.choice(R_VALUES))
        length = 60
        zy = (ya + yb) / 2 - length / 2
        bbox = draw.draw_zigzag(arr, x, zy, length=length, amp=7, vertical=True)
        wire((x, ya), (x, zy - 1), net_top)
        wire((x, zy + length + 1), (x, yb), net_bottom)
        symbols.append({
            "kind": "resistor", "value": value, "unit": "ohm", "bbox": list(bbox),
            "plus": None, "net_a": net_top, "net_b": net_bottom,
        })

    if template == 0:
        # single loop: battery left, one resistor top
        add_battery("A", "B")
        add_resistor_h(y0, x0, x1, "A", "B")
        wire((x1, y0), (x1, y1), "B")
        wire((x0, y1), (x1, y1), "B")
    elif template == 1:
        # series: resistor top, resistor right
        add_battery("A", "B")
        add_resistor_h(y0, x0, x1, "A", "C")
        add_resistor_v(x1, y0, y1, "C", "B")
        wire((x0, y1), (x1, y1), "B")
    elif template == 2:
        # parallel: resistor on the right edge, resistor on a middle branch
        add_battery("A", "B")
        wire((x0, y0), (x1, y0), "A")
        add_resistor_v(x1, y0, y1, "A", "B")
        wire((x0, y1), (x1, y1), "B")
        add_resistor_v(160, y0, y1, "A", "B")
        draw.draw_disc(arr, (160, y0), 3)
        draw.draw_disc(arr, (160, y1), 3)
    else:
        # series top + parallel middle/right
        add_battery("A", "B")
        add_resistor_h(y0, x0, 160, "A", "C")
        wire((160, y0), (x1, y0), "C")
        add_resistor_v(x1, y0, y1, "C", "B")
        add_resistor_v(160, y0, y1, "C", "B")
        wire((x0, y1), (x1, y1), "B")
        draw.draw_disc(arr, (160, y0), 3)
        draw.draw_disc(arr, (160, y1), 3)

    # collinear touching runs on one net merge into a single drawn wire
    merged_wires = []
    by_line: dict[tuple, list] = {}
    for p0, p1, net in wires:
        if p0[1] == p1[1]:
            key = ("h", p0[1], net)
            span = tuple(sorted((p0[0], p1[0])))
        else:
            key = ("v", p0[0], net)
            span = tuple(sorted((p0[1], p1[1])))
        by_line.setdefault(key, []).append(span)
    for (orient, coord, _net), spans in sorted(by_line.items()):
        spans.sort()
        lo, hi = spans[0]
        for s_lo, s_hi in spans[1:]:
            if s_lo <= hi + 4:
                hi = max(hi, s_hi)
            else:
                merged_wires.append((orient, coord, lo, hi))
                lo, hi = s_lo, s_hi
        merged_wires.append((orient, coord, lo, hi))
    wire_spans = [
        ([lo, coord] if orient == "h" else [coord, lo],
         [hi, coord] if orient == "h" else [coord, hi])
        for orient, coord, lo, hi in merged_wires
    ]

    # ground-truth netlist; currents from the loop-analysis oracle
    net_names = sorted({s["net_a"] for s in symbols} | {s["net_b"] for s in symbols})
    components = []
    for k, s in enumerate(symbols):
        cid = f"sym{k}"
        s["id"] = cid
        plus_net = s["net_a"] if s["kind"] == "battery" else None
        components.append(Component(
            id=cid, kind=s["kind"], value=s["value"],
            node_a=s["net_a"], node_b=s["net_b"], plus=plus_net,
        ))
    truth_netlist = Netlist(nodes=tuple(net_names), components=tuple(components),
                            ref=net_names[0])
    solution = solve_dc_mesh(truth_netlist)

    ann = {
        "tokens": [],
        "symbols": [
            {"id": s["id"], "kind": s["kind"], "value": s["value"], "unit": s["unit"],
             "bbox": s["bbox"], "plus": s["plus"]}
            for s in symbols
        ],
    }
    truth = {
        "category": "circuits",
        "netlist": truth_netlist.to_json(),
        "solution": solution.to_json(),
        "symbols": [
            {"id": s["id"], "kind": s["kind"], "bbox": s["bbox"], "value": s["value"]}
            for s in symbols
        ],
        "wires": [[list(p0), list(p1)] for p0, p1 in wire_spans],
    }
    return arr, truth, ann


def _bbox_iou(a, b) -> float:
    ix0, iy0 = max(a[0], b[0]), max(a[1], b[1])
    ix1, iy1 = min(a[2], b[2]), min(a[3], b[3])
    if ix0 >= ix1 or iy0 >= iy1:
        return 0.0
    inter = (ix1 - ix0) * (iy1 - iy0)
    ua = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    return inter / ua


def _connectivity_matches(ext: Netlist, truth: Netlist, comp_map: dict[str, str]) -> bool:
    """Node-bijection search respecting component identity and polarity."""
    comps = sorted(ext.components, key=lambda c: c.id)
    if {comp_map.get(c.id) for c in comps} != {c.id for c in truth.components}:
        return False
    assignment: dict[str, str] = {}

    def backtrack(i: int) -> bool:
        if i == len(comps):
            return True
        c = comps[i]
        t = truth.component(comp_map[c.id])
        if c.kind == "battery":
            same = ((c.plus == c.node_a) == (t.plus == t.node_a))
            options = [(t.node_a, t.node_b)] if same else [(t.node_b, t.node_a)]
        else:
            options = [(t.node_a, t.node_b), (t.node_b, t.node_a)]
        for ta, tb in options:
            added = []
            ok = True
            for en, tn in ((c.node_a, ta), (c.node_b, tb)):
                if en in assignment:
                    if assignment[en] != tn:
                        ok = False
                        break
                else:
                    if tn in assignment.values():
                        ok = False
                        break
                    assignment[en] = tn
                    added.append(en)
            if ok and backtrack(i + 1):
                return True
            for en in added:
                del assignment[en]
        return False

    return backtrack(0)


def _evaluate_circuit_case(case_dir: Path) -> dict:
    truth = json.loads((case_dir / "truth.json").read_text())
    ann = json.loads((case_dir / "page.ann.json").read_text())
    image = RasterImage.open(case_dir / "page.png")
    stages = {}

    lines = detect_lines(image)
    found_all = True
    for (p0, p1) in truth["wires"]:
        hit = any(
            min(abs(s.p0[0] - p0[0]) + abs(s.p0[1] - p0[1]),
                abs(s.p0[0] - p1[0]) + abs(s.p0[1] - p1[1])) <= 6
            and min(abs(s.p1[0] - p0[0]) + abs(s.p1[1] - p0[1]),
                    abs(s.p1[0] - p1[0]) + abs(s.p1[1] - p1[1])) <= 6
            for s in lines
        )
        found_all = found_all and hit
    stages["line_detection"] = found_all

    detections = detect_symbols(image, ann.get("symbols"))
    comp_map = {}
    sym_ok = len(detections) == len(truth["symbols"])
    for det in detections:
        best = None
        best_iou = 0.0
        for t in truth["symbols"]:
            iou = _bbox_iou(det.bbox, t["bbox"])
            if iou > best_iou:
                best, best_iou = t, iou
        if best is None or best_iou < 0.7 or best["kind"] != det.kind:
            sym_ok = False
            break
        if best["id"] in comp_map.values():
            sym_ok = False
            break
        comp_map[det.id] = best["id"]
    stages["symbol_recognition"] = sym_ok

    truth_netlist = Netlist.from_json(truth["netlist"])
    truth_solution = truth["solution"]
    sim_ok = False
    if sym_ok:
        junctions = detect_junctions(lines)
        extracted = extract_netlist(detections, lines, junctions)
        if not extracted.warnings and _connectivity_matches(extracted, truth_netlist, comp_map):
            solution = solve_dc(extracted)
            sim_ok = True
            for c in extracted.components:
                want = truth_solution["currents"][comp_map[c.id]]
                got = solution.currents[c.id]
                if abs(abs(got) - abs(want)) > 1e-6:
                    sim_ok = False
                    break
    stages["simulation"] = sim_ok

    edits_ok = sim_ok
    if not edits_ok:
        # manual-edit escape hatch: author fixes the connectivity by hand
        solution = solve_dc(truth_netlist)
        edits_ok = all(
            abs(solution.currents[c.id] - truth_solution["currents"][c.id]) <= 1e-6
            for c in truth_netlist.components
        )
    stages["simulation_with_minor_edits"] = edits_ok
    return stages


# --------------------------------------------------------------------------
# kinematics
# --------------------------------------------------------------------------

def _gen_kinematics_case(rng: np.random.Generator):
    arr = draw.canvas(320, 240)
    template = ("free_fall", "ramp", "resting")[int(rng.integers(0, 3))]
    block_color = (200, 40, 40)
    ramp_color = (120, 120, 120)
    side = int(rng.integers(18, 28))

    masks = {}
    if template == "free_fall":
        bx = int(rng.integers(60, 240))
        by = int(rng.integers(16, 40))
        arr[by:by + side, bx:bx + side, :3] = block_color
        block_mask = np.zeros((240, 320), dtype=bool)
        block_mask[by:by + side, bx:bx + side] = True
        masks["block"] = block_mask
        truth = {
            "category": "kinematics", "template": "free_fall",
            "block_prompt": [bx + side // 2, by + side // 2],
            "duration": 0.5,
        }
    elif template == "ramp":
        # 45-degree ramp: hypotenuse x + y = 320 between (120,200) and (240,80)
        ramp_mask = np.zeros((240, 320), dtype=bool)
        yy, xx = np.mgrid[0:240, 0:320]
        ramp_mask = (xx + yy >= 320) & (xx >= 120) & (xx <= 240) & (yy <= 200)
        for c in range(3):
            arr[:, :, c] = np.where(ramp_mask, ramp_color[c], arr[:, :, c])
        # block on the slope near the top, corner touching the hypotenuse
        cx = int(rng.integers(180, 236 - side))
        corner = (cx + side, 320 - (cx + side))
        by = corner[1] - side
        arr[by:by + side, cx:cx + side, :3] = block_color
        block_mask = np.zeros((240, 320), dtype=bool)
        block_mask[by:by + side, cx:cx + side] = True
        masks["block"] = block_mask
        masks["ramp"] = ramp_mask
        truth = {
            "category": "kinematics", "template": "ramp",
            "block_prompt": [cx + side // 2, by + side // 2],
            "ramp_prompt": [232, 198],
            "duration": 0.6,
        }
    else:
        floor_y = 200
        arr[floor_y:floor_y + 16, 20:300, :3] = ramp_color
        floor_mask = np.zeros((240, 320), dtype=bool)
        floor_mask[floor_y:floor_y + 16, 20:300] = True
        bx = int(rng.integers(60, 260))
        by = floor_y - side
        arr[by:by + side, bx:bx + side, :3] = block_color
        block_mask = np.zeros((240, 320), dtype=bool)
        block_mask[by:by + side, bx:bx + side] = True
        masks["block"] = block_mask
        masks["ramp"] = floor_mask
        truth = {
            "category": "kinematics", "template": "resting",
            "block_prompt": [bx + side // 2, by + side // 2],
            "ramp_prompt": [160, floor_y + 8],
            "duration": 1.0,
        }
    return arr, truth, masks


def _mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    inter = (a & b).sum()
    union = (a | b).sum()
    return float(inter) / float(union) if union else 0.0


def _evaluate_kinematics_case(case_dir: Path) -> dict:
    truth = json.loads((case_dir / "truth.json").read_text())
    image = RasterImage.open(case_dir / "page.png")
    stages = {}
    g = 9.81

    block_truth = SegmentMask.from_png((case_dir / "mask_block.png").read_bytes())
    px, py = truth["block_prompt"]
    block_mask = segment_region(image, [PointPrompt(px, py)])
    seg_ok = _mask_iou(block_mask.bits, block_truth.bits) >= 0.99
    ramp_mask = None
    if "ramp_prompt" in truth:
        ramp_truth = SegmentMask.from_png((case_dir / "mask_ramp.png").read_bytes())
        rx, ry = truth["ramp_prompt"]
        ramp_mask = segment_region(image, [PointPrompt(rx, ry)])
        seg_ok = seg_ok and _mask_iou(ramp_mask.bits, ramp_truth.bits) >= 0.99
    stages["object_segmentation"] = seg_ok

    poly_ok = False
    placement_ok = False
    sim_ok = False
    try:
        def polygon_for(mask):
            contours = [c for c in mask_to_contours(mask) if signed_area(c.points) > 0]
            return simplify_contour(max(contours, key=lambda c: signed_area(c.points)), 2.0)

        block_poly = polygon_for(block_mask)
        pieces = convex_decompose(block_poly)
        poly_ok = (
            len(block_poly.vertices) >= 3
            and all(p.is_convex() for p in pieces)
            and abs(sum(p.area for p in pieces) - block_poly.area) <= 1e-6 * block_poly.area
        )

        world = World()
        block = build_body(block_poly, block_mask, "dynamic",
                           {"mass": 1.0, "friction": 0.0, "lock_rotation": True},
                           body_id="block")
        world.add_body(block)
        box = bounding_box(block_mask)
        bx0, by0, bx1, by1 = block.aabb()
        scale = world.pixel_scale
        placement_ok = (
            abs(bx0 - box.x0 * scale) <= 1e-9 and abs(by0 - box.y0 * scale) <= 1e-9
            and abs(bx1 - box.x1 * scale) <= 1e-9 and abs(by1 - box.y1 * scale) <= 1e-9
        )

        if ramp_mask is not None:
            ramp_poly = polygon_for(ramp_mask)
            ramp = build_body(ramp_poly, ramp_mask, "static", {"friction": 0.0},
                              body_id="ramp")
            world.add_body(ramp)

        duration = truth["duration"]
        template = truth["template"]
        if template == "free_fall":
            y_start = block.py
            world.step(duration)
            dy = block.py - y_start
            dt = world.timestep
            sim_ok = (
                abs(block.vy - g * duration) <= 1e-6
                and abs(dy - g * duration**2 / 2.0) <= g * dt / 2.0 * duration + 1e-9
            )
        elif template == "ramp":
            world.step(0.3)
            v1 = (block.vx, block.vy)
            world.step(0.2)
            v2 = (block.vx, block.vy)
            a = math.hypot(v2[0] - v1[0], v2[1] - v1[1]) / 0.2
            sim_ok = abs(a - g / math.sqrt(2)) / (g / math.sqrt(2)) <= 0.02
        else:  # resting
            y_start = block.py
            world.step(duration)
            sim_ok = abs(block.py - y_start) <= 0.2 * world.pixel_scale
    except Exception:
        pass

    stages["polygon_generation"] = poly_ok
    stages["polygon_placement"] = placement_ok
    stages["simulation"] = sim_ok
    return stages


# --------------------------------------------------------------------------
# optics
# --------------------------------------------------------------------------

def _gen_optics_case(rng: np.random.Generator):
    arr = draw.canvas(420, 260)
    axis_y = 130
    lens_x = 260
    f = float(rng.integers(45, 76))
    d_o = float(rng.integers(int(1.15 * f), int(2.8 * f)))
    while abs(d_o - f) < 8:
        d_o += 8
    h_o = float(rng.integers(28, 56))

    arr[60:200, lens_x - 3:lens_x + 3, :3] = (40, 80, 220)          # lens strip
    obj_x = lens_x - d_o
    arr[int(axis_y - h_o):axis_y + 2, int(obj_x - 7):int(obj_x + 7), :3] = (30, 160, 60)
    draw.draw_disc(arr, (lens_x - f, axis_y), 3, (200, 30, 30))
    draw.draw_disc(arr, (lens_x + f, axis_y), 3, (200, 30, 30))

    truth = {
        "category": "optics",
        "f": f, "d_o": d_o, "h_o": h_o,
        "lens_prompt": [lens_x, axis_y - 40],
        "object_prompt": [int(obj_x), axis_y - int(h_o / 2)],
        "marker_prompts": [[int(lens_x - f), axis_y], [int(lens_x + f), axis_y]],
        "lens_x": lens_x, "axis_y": axis_y,
    }
    return arr, truth


def _evaluate_optics_case(case_dir: Path) -> dict:
    truth = json.loads((case_dir / "truth.json").read_text())
    image = RasterImage.open(case_dir / "page.png")
    stages = {}

    obj_mask = segment_region(image, [PointPrompt(*truth["object_prompt"])])
    lens_mask = segment_region(image, [PointPrompt(*truth["lens_prompt"])])
    ob = bounding_box(obj_mask)
    lb = bounding_box(lens_mask)
    stages["object_segmentation"] = (
        abs((ob.x0 + ob.x1) / 2 - (truth["lens_x"] - truth["d_o"])) <= 2.0
        and abs((lb.x0 + lb.x1) / 2 - truth["lens_x"]) <= 2.0
    )

    sim_ok = False
    try:
        lens_cx = (lb.x0 + lb.x1) / 2.0
        axis_y = (lb.y0 + lb.y1) / 2.0
        f_estimates = []
        for mp in truth["marker_prompts"]:
            marker = segment_region(image, [PointPrompt(*mp)])
            mb = bounding_box(marker)
            f_estimates.append(abs((mb.x0 + mb.x1) / 2.0 - lens_cx))
        f_est = sum(f_estimates) / len(f_estimates)
        d_o_est = lens_cx - (ob.x0 + ob.x1) / 2.0
        h_o_est = axis_y - ob.y0
        result = solve_thin_lens(d_o_est, f_est, h_o_est)
        expected = solve_thin_lens(truth["d_o"], truth["f"], truth["h_o"])
        sim_ok = (
            abs(f_est - truth["f"]) <= 1.5
            and result.nature == expected.nature
            and abs(result.image_distance - expected.image_distance)
            <= 0.05 * abs(expected.image_distance) + 2.0
        )
    except Exception:
        pass
    stages["simulation"] = sim_ok
    return stages


# --------------------------------------------------------------------------
# animation
# --------------------------------------------------------------------------

def _gen_animation_case(rng: np.random.Generator):
    arr = draw.canvas(320, 240)
    cx = int(rng.integers(130, 190))
    cy = int(rng.integers(100, 140))
    r = int(rng.integers(40, 70))
    yy, xx = np.mgrid[0:240, 0:320]
    dist = np.sqrt((xx - cx) ** 2 + (yy - cy) ** 2)
    ring = np.abs(dist - r) <= 1.5
    for c in range(3):
        arr[:, :, c] = np.where(ring, 0, arr[:, :, c])
    # the animated sprite: a small blob away from the ring
    bx = cx + r + 30 if cx + r + 40 < 320 else cx - r - 30
    draw.draw_disc(arr, (bx, cy), 6, (230, 140, 30))

    truth = {
        "category": "animation",
        "center": [cx, cy], "radius": r,
        "path_prompt": [cx + r, cy],
        "object_prompt": [bx, cy],
        "length": 2 * math.pi * r,
    }
    return arr, truth


def _evaluate_animation_case(case_dir: Path) -> dict:
    truth = json.loads((case_dir / "truth.json").read_text())
    image = RasterImage.open(case_dir / "page.png")
    stages = {}

    obj_mask = segment_region(image, [PointPrompt(*truth["object_prompt"])])
    ob = bounding_box(obj_mask)
    stages["object_segmentation"] = (
        abs((ob.x0 + ob.x1) / 2 - truth["object_prompt"][0]) <= 2.0
    )

    line_ok = False
    anim_ok = False
    try:
        path_mask = segment_region(image, [PointPrompt(*truth["path_prompt"])])
        skeleton = skeletonize(path_mask)
        line = skeleton_to_polyline(skeleton)
        # the traced points must sit on the drawn circle...
        cx, cy = truth["center"]
        radii = [math.hypot(x - cx, y - cy) for x, y in line.points]
        mean_r = sum(radii) / len(radii)
        radius_ok = abs(mean_r - truth["radius"]) <= 1.5 and max(
            abs(r - truth["radius"]) for r in radii
        ) <= 3.0
        # ...and the smoothed arc length must match the circumference
        # (raw 8-connected pixel walks inflate curve length a few percent)
        path = parametrize(line, path_id="orbit", smooth=True)
        line_ok = (
            path.closed
            and radius_ok
            and abs(path.length - truth["length"]) / truth["length"] <= 0.04
        )
        track = AnimationTrack(object_id="o", path_id="orbit", speed=32.0)
        period = path.length / track.speed
        a = track_pose(track, path, 1.0)
        b = track_pose(track, path, 1.0 + period)
        anim_ok = abs(a.x - b.x) <= 1e-9 and abs(a.y - b.y) <= 1e-9
    except Exception:
        pass
    stages["line_segmentation"] = line_ok
    stages["animation"] = anim_ok
    return stages


# --------------------------------------------------------------------------
# drivers
# --------------------------------------------------------------------------

STAGES = {
    "kinematics": ("object_segmentation", "polygon_generation", "polygon_placement", "simulation"),
    "animation": ("object_segmentation", "line_segmentation", "animation"),
    "optics": ("object_segmentation", "simulation"),
    "circuits": ("line_detection", "symbol_recognition", "simulation", "simulation_with_minor_edits"),
}


def generate_corpus(out_dir, category: str, n: int, seed: int) -> list[Path]:
    if category not in CATEGORIES:
        raise ValueError(f"unknown category {category!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cases = []
    for i in range(n):
        rng = np.random.default_rng(seed * 1000 + i)
        case_dir = out / f"case_{i:03d}"
        case_dir.mkdir(parents=True, exist_ok=True)
        if category == "circuits":
            arr, truth, ann = _gen_circuit_case(rng)
            (case_dir / "page.ann.json").write_text(
                json.dumps(ann, sort_keys=True, indent=1)
            )
        elif category == "kinematics":
            arr, truth, masks = _gen_kinematics_case(rng)
            for name, bits in masks.items():
                (case_dir / f"mask_{name}.png").write_bytes(SegmentMask(bits).to_png())
        elif category == "optics":
            arr, truth = _gen_optics_case(rng)
        else:
            arr, truth = _gen_animation_case(rng)
        truth["seed"] = seed * 1000 + i
        _write_png(case_dir / "page.png", arr)
        (case_dir / "truth.json").write_text(json.dumps(truth, sort_keys=True, indent=1))
        cases.append(case_dir)
    return cases


def evaluate_corpus(corpus_dir, category: str) -> dict:
    corpus = Path(corpus_dir)
    evaluators = {
        "circuits": _evaluate_circuit_case,
        "kinematics": _evaluate_kinematics_case,
        "optics": _evaluate_optics_case,
        "animation": _evaluate_animation_case,
    }
    evaluate = evaluators[category]
    case_dirs = sorted(p for p in corpus.iterdir() if p.is_dir() and p.name.startswith("case_"))
    cases = []
    totals = {name: 0 for name in STAGES[category]}
    for case_dir in case_dirs:
        stages = evaluate(case_dir)
        cases.append({"case": case_dir.name, "stages": stages})
        for name, ok in stages.items():
            if ok:
                totals[name] += 1
    n = len(case_dirs)
    return {
        "category": category,
        "n": n,
        "stages": [
            {"name": name, "passed": totals[name], "total": n,
             "rate": totals[name] / n if n else 0.0}
            for name in STAGES[category]
        ],
        "cases": cases,
    }
