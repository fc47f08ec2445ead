"""Deterministic circuit-symbol detection over ink strokes.

Stand-in for the hosted vision model. Resistors read as zigzag ink runs
(oblique strokes with several perpendicular reversals) or small rectangle
outlines; batteries as short parallel plate pairs of unequal length,
capacitors as equal-length pairs. Values come from the annotation sidecar
when one overlaps; otherwise schema defaults are used and flagged.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from dataclasses import dataclass

from ..vision.lines import LineSegment, detect_lines
from ..vision.raster import RasterImage

DEFAULT_VALUES = {"resistor": 100.0, "battery": 9.0, "capacitor": 1e-6}
PLATE_MAX_LEN = 30.0
PLATE_MIN_GAP = 4.0
PLATE_MAX_GAP = 14.0
BATTERY_LENGTH_RATIO = 0.8  # shorter/longer below this reads as a battery
BOX_MAX_SIDE = 48.0

_EIGHT_CONN = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class SymbolDetection:
    id: str
    kind: str                      # resistor | battery | capacitor
    bbox: tuple[float, float, float, float]
    value: float
    unit: str
    terminals: tuple[tuple[float, float], tuple[float, float]]
    plus: tuple[float, float] | None = None   # pixel point of the + terminal
    value_assumed: bool = False


def _terminals_for(bbox, horizontal_flow: bool):
    x0, y0, x1, y1 = bbox
    if horizontal_flow:
        cy = (y0 + y1) / 2.0
        return ((x0, cy), (x1, cy))
    cx = (x0 + x1) / 2.0
    return ((cx, y0), (cx, y1))


def _iou(a, b) -> float:
    ix0 = max(a[0], b[0])
    iy0 = max(a[1], b[1])
    ix1 = min(a[2], b[2])
    iy1 = min(a[3], b[3])
    if ix0 >= ix1 or iy0 >= iy1:
        return 0.0
    inter = (ix1 - ix0) * (iy1 - iy0)
    area_a = (a[2] - a[0]) * (a[3] - a[1])
    area_b = (b[2] - b[0]) * (b[3] - b[1])
    return inter / (area_a + area_b - inter)


def _zigzag_components(image: RasterImage):
    """Oblique-ink components whose perpendicular profile reverses like a
    zigzag run; returns their tight bboxes."""
    ink = image.luminance() < 128.0
    if not ink.any():
        return []
    # kernel 12 (not the line detector's 8): zigzag peak caps form short
    # axis-aligned runs that must survive, while real wires are far longer
    h_open = ndimage.binary_opening(ink, structure=np.ones((1, 12), dtype=bool))
    v_open = ndimage.binary_opening(ink, structure=np.ones((12, 1), dtype=bool))
    rem = ink & ~h_open & ~v_open
    labels, n = ndimage.label(rem, structure=_EIGHT_CONN)
    boxes = []
    for comp_id in range(1, n + 1):
        ys, xs = np.nonzero(labels == comp_id)
        if len(xs) < 30:
            continue
        w = xs.max() - xs.min() + 1
        h = ys.max() - ys.min() + 1
        if max(w, h) < 20 or min(w, h) < 6:
            continue
        pts = np.stack([xs, ys], axis=1).astype(np.float64)
        center = pts.mean(axis=0)
        d = pts - center
        cov = d.T @ d / len(pts)
        evals, evecs = np.linalg.eigh(cov)
        axis = evecs[:, int(np.argmax(evals))]
        t = d @ axis
        perp = d @ np.array([-axis[1], axis[0]])
        # binned perpendicular profile along the major axis
        order = np.argsort(t)
        t_sorted = t[order]
        p_sorted = perp[order]
        nbins = max(4, int((t_sorted[-1] - t_sorted[0]) / 4.0))
        edges = np.linspace(t_sorted[0], t_sorted[-1] + 1e-9, nbins + 1)
        profile = []
        for b in range(nbins):
            sel = (t_sorted >= edges[b]) & (t_sorted < edges[b + 1])
            if sel.any():
                profile.append(float(p_sorted[sel].mean()))
        reversals = 0
        for p0, p1 in zip(profile, profile[1:]):
            if (p0 > 1.0 and p1 < -1.0) or (p0 < -1.0 and p1 > 1.0):
                reversals += 1
        signs = [1 if p > 1.0 else (-1 if p < -1.0 else 0) for p in profile]
        signs = [s for s in signs if s != 0]
        flips = sum(1 for s0, s1 in zip(signs, signs[1:]) if s0 != s1)
        if max(reversals, flips) >= 3:
            boxes.append((float(xs.min()), float(ys.min()), float(xs.max() + 1), float(ys.max() + 1)))
    boxes.sort()
    return boxes


def _rectangle_boxes(segs: list[LineSegment]):
    """Small closed rectangle outlines (box-style resistor), returning
    (bbox, consumed segment ids)."""
    horiz = [(i, s) for i, s in enumerate(segs) if s.orientation == "horizontal" and s.length <= BOX_MAX_SIDE]
    vert = [(i, s) for i, s in enumerate(segs) if s.orientation == "vertical" and s.length <= BOX_MAX_SIDE]
    out = []
    used: set[int] = set()
    for i, top in horiz:
        if i in used:
            continue
        for j, bot in horiz:
            if j == i or j in used:
                continue
            dy = bot.p0[1] - top.p0[1]
            if not (6.0 <= dy <= 30.0):
                continue
            if abs(top.p0[0] - bot.p0[0]) > 4 or abs(top.p1[0] - bot.p1[0]) > 4:
                continue
            corners_ok = []
            for k, v in vert:
                if k in used:
                    continue
                near_left = abs(v.p0[0] - top.p0[0]) <= 4
                near_right = abs(v.p0[0] - top.p1[0]) <= 4
                spans = v.p0[1] <= top.p0[1] + 4 and v.p1[1] >= bot.p0[1] - 4
                if (near_left or near_right) and spans:
                    corners_ok.append(k)
            if len(corners_ok) >= 2:
                ids = {i, j, *corners_ok[:2]}
                used |= ids
                x0 = min(top.p0[0], bot.p0[0]) - 1
                x1 = max(top.p1[0], bot.p1[0]) + 1
                y0 = top.p0[1] - 1
                y1 = bot.p0[1] + 1
                out.append(((x0, y0, x1, y1), ids))
                break
    return out, used


def _pair_plates(candidates):
    """Greedy pairing of short parallel strokes into battery/capacitor pairs."""
    pairs = []
    used = set()
    order = sorted(range(len(candidates)), key=lambda i: (candidates[i][1].p0[1], candidates[i][1].p0[0]))
    for oi in order:
        if candidates[oi][0] in used:
            continue
        a = candidates[oi][1]
        vertical = a.orientation == "vertical"
        best = None
        best_gap = None
        for oj in order:
            if oj == oi or candidates[oj][0] in used:
                continue
            b = candidates[oj][1]
            if b.orientation != a.orientation:
                continue
            if vertical:
                gap = abs(a.p0[0] - b.p0[0])
                overlap = min(a.p1[1], b.p1[1]) - max(a.p0[1], b.p0[1])
            else:
                gap = abs(a.p0[1] - b.p0[1])
                overlap = min(a.p1[0], b.p1[0]) - max(a.p0[0], b.p0[0])
            if not (PLATE_MIN_GAP <= gap <= PLATE_MAX_GAP):
                continue
            if overlap < 0.5 * min(a.length, b.length):
                continue
            if best is None or gap < best_gap:
                best = oj
                best_gap = gap
        if best is not None:
            used.add(candidates[oi][0])
            used.add(candidates[best][0])
            pairs.append((a, candidates[best][1]))
    return pairs


def detect_symbols(image: RasterImage, annotations: list[dict] | None = None) -> list[SymbolDetection]:
    """Detect resistor/battery/capacitor symbols; empty list when none."""
    segs = detect_lines(image)
    detections = []  # (kind, bbox, terminals, plus_point)

    for bbox in _zigzag_components(image):
        horizontal_flow = (bbox[2] - bbox[0]) >= (bbox[3] - bbox[1])
        detections.append(("resistor", bbox, _terminals_for(bbox, horizontal_flow), None))

    boxes, used_ids = _rectangle_boxes(segs)
    for bbox, _ids in boxes:
        horizontal_flow = (bbox[2] - bbox[0]) >= (bbox[3] - bbox[1])
        detections.append(("resistor", bbox, _terminals_for(bbox, horizontal_flow), None))

    plate_candidates = [
        (i, s)
        for i, s in enumerate(segs)
        if i not in used_ids
        and s.orientation in ("horizontal", "vertical")
        and s.length <= PLATE_MAX_LEN
    ]
    for a, b in _pair_plates(plate_candidates):
        x0 = min(a.p0[0], a.p1[0], b.p0[0], b.p1[0]) - 1
        x1 = max(a.p0[0], a.p1[0], b.p0[0], b.p1[0]) + 1
        y0 = min(a.p0[1], a.p1[1], b.p0[1], b.p1[1]) - 1
        y1 = max(a.p0[1], a.p1[1], b.p0[1], b.p1[1]) + 1
        bbox = (x0, y0, x1, y1)
        vertical_plates = a.orientation == "vertical"
        ratio = min(a.length, b.length) / max(a.length, b.length)
        kind = "battery" if ratio < BATTERY_LENGTH_RATIO else "capacitor"
        terminals = _terminals_for(bbox, horizontal_flow=vertical_plates)
        plus_point = None
        if kind == "battery":
            longer = a if a.length >= b.length else b
            lx = (longer.p0[0] + longer.p1[0]) / 2.0
            ly = (longer.p0[1] + longer.p1[1]) / 2.0
            plus_point = min(terminals, key=lambda t: (t[0] - lx) ** 2 + (t[1] - ly) ** 2)
        detections.append((kind, bbox, terminals, plus_point))

    detections.sort(key=lambda d: (d[1][1], d[1][0]))
    out = []
    annotations = annotations or []
    for k, (kind, bbox, terminals, plus_point) in enumerate(detections):
        value = DEFAULT_VALUES[kind]
        unit = {"resistor": "ohm", "battery": "volt", "capacitor": "farad"}[kind]
        assumed = True
        for ann in annotations:
            ann_bbox = tuple(ann.get("bbox", ()))
            if len(ann_bbox) == 4 and _iou(bbox, ann_bbox) >= 0.3 and "value" in ann:
                value = float(ann["value"])
                unit = ann.get("unit", unit)
                assumed = False
                if kind == "battery" and ann.get("plus") is not None:
                    px, py = ann["plus"]
                    plus_point = min(
                        terminals, key=lambda t: (t[0] - px) ** 2 + (t[1] - py) ** 2
                    )
                break
        out.append(SymbolDetection(
            id=f"s{k}", kind=kind, bbox=bbox, value=value, unit=unit,
            terminals=terminals, plus=plus_point, value_assumed=assumed,
        ))
    return out
