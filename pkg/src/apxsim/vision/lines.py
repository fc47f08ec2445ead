"""Straight-stroke detection over dark ink and junction clustering.

Horizontal and vertical strokes come from morphological opening with 1x8 /
8x1 kernels; remaining ink components are fit as oblique strokes via their
principal axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .raster import RasterImage

DEFAULT_INK_THRESHOLD = 128.0
DEFAULT_MIN_LENGTH = 8
DEFAULT_MAX_THICKNESS = 4
DEFAULT_JUNCTION_RADIUS = 6.0
_ANGLE_BIN_DEG = 10.0

_EIGHT_CONN = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class LineSegment:
    p0: tuple[float, float]
    p1: tuple[float, float]
    orientation: str  # horizontal | vertical | oblique

    @property
    def length(self) -> float:
        return math.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1])

    @property
    def angle_deg(self) -> float:
        dx = self.p1[0] - self.p0[0]
        dy = self.p1[1] - self.p0[1]
        ang = math.degrees(math.atan2(dy, dx)) % 180.0
        return ang


def classify_angle(angle_deg: float) -> str:
    a = angle_deg % 180.0
    if a <= _ANGLE_BIN_DEG or a >= 180.0 - _ANGLE_BIN_DEG:
        return "horizontal"
    if abs(a - 90.0) <= _ANGLE_BIN_DEG:
        return "vertical"
    return "oblique"


def _axis_segments(opened: np.ndarray, horizontal: bool, min_length: int, max_thickness: int):
    segs = []
    labels, n = ndimage.label(opened, structure=_EIGHT_CONN)
    for comp_id in range(1, n + 1):
        ys, xs = np.nonzero(labels == comp_id)
        x0, x1 = int(xs.min()), int(xs.max())
        y0, y1 = int(ys.min()), int(ys.max())
        if horizontal:
            thickness = y1 - y0 + 1
            length = x1 - x0 + 1
            if thickness <= max_thickness and length >= min_length:
                yc = (y0 + y1) / 2.0
                segs.append(LineSegment((float(x0), yc), (float(x1), yc), "horizontal"))
        else:
            thickness = x1 - x0 + 1
            length = y1 - y0 + 1
            if thickness <= max_thickness and length >= min_length:
                xc = (x0 + x1) / 2.0
                segs.append(LineSegment((xc, float(y0)), (xc, float(y1)), "vertical"))
    return segs


def _oblique_segments(rem: np.ndarray, min_length: int, max_thickness: int):
    segs = []
    labels, n = ndimage.label(rem, structure=_EIGHT_CONN)
    for comp_id in range(1, n + 1):
        ys, xs = np.nonzero(labels == comp_id)
        if len(xs) < min_length:
            continue
        pts = np.stack([xs, ys], axis=1).astype(np.float64)
        center = pts.mean(axis=0)
        d = pts - center
        cov = d.T @ d / len(pts)
        evals, evecs = np.linalg.eigh(cov)
        axis = evecs[:, int(np.argmax(evals))]
        if axis[0] < 0 or (axis[0] == 0 and axis[1] < 0):
            axis = -axis
        t = d @ axis
        perp = d @ np.array([-axis[1], axis[0]])
        length = float(t.max() - t.min()) + 1.0
        spread = float(perp.max() - perp.min()) + 1.0
        if length < min_length or spread > max_thickness:
            continue
        i0 = int(np.argmin(t))
        i1 = int(np.argmax(t))
        p0 = (float(xs[i0]), float(ys[i0]))
        p1 = (float(xs[i1]), float(ys[i1]))
        ang = math.degrees(math.atan2(p1[1] - p0[1], p1[0] - p0[0]))
        segs.append(LineSegment(p0, p1, classify_angle(ang)))
    return segs


def detect_lines(
    image: RasterImage,
    ink_threshold: float = DEFAULT_INK_THRESHOLD,
    min_length: int = DEFAULT_MIN_LENGTH,
    max_thickness: int = DEFAULT_MAX_THICKNESS,
) -> list[LineSegment]:
    """Detect straight ink strokes, classified by orientation."""
    ink = image.luminance() < ink_threshold
    if not ink.any():
        return []
    h_open = ndimage.binary_opening(ink, structure=np.ones((1, min_length), dtype=bool))
    v_open = ndimage.binary_opening(ink, structure=np.ones((min_length, 1), dtype=bool))
    segs = _axis_segments(h_open, True, min_length, max_thickness)
    segs += _axis_segments(v_open, False, min_length, max_thickness)
    rem = ink & ~h_open & ~v_open
    segs += _oblique_segments(rem, min_length, max_thickness)
    segs.sort(key=lambda s: (s.p0[1], s.p0[0], s.p1[1], s.p1[0], s.orientation))
    return segs


@dataclass(frozen=True)
class Junction:
    position: tuple[float, float]
    degree: int


def _project_onto(seg: LineSegment, p: tuple[float, float]):
    ax, ay = seg.p0
    bx, by = seg.p1
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 == 0:
        return 0.0, math.hypot(p[0] - ax, p[1] - ay), (ax, ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / seg2
    proj = (ax + t * dx, ay + t * dy)
    return t, math.hypot(p[0] - proj[0], p[1] - proj[1]), proj


def detect_junctions(lines: list[LineSegment], radius: float = DEFAULT_JUNCTION_RADIUS) -> list[Junction]:
    """Cluster endpoint meetings (and endpoint-on-interior T contacts).

    Degree counts incident line arms: one per clustered endpoint, two for a
    segment passed through its interior. Output is invariant under input
    permutation (clusters sorted by position).
    """
    if radius <= 0:
        raise ValueError("radius must be > 0")
    endpoints = []  # (point, segment index)
    for i, seg in enumerate(lines):
        endpoints.append((seg.p0, i))
        endpoints.append((seg.p1, i))

    parent = list(range(len(endpoints)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    r2 = radius * radius
    for i in range(len(endpoints)):
        pi, _ = endpoints[i]
        for j in range(i + 1, len(endpoints)):
            pj, _ = endpoints[j]
            if (pi[0] - pj[0]) ** 2 + (pi[1] - pj[1]) ** 2 <= r2:
                union(i, j)

    # endpoint-to-interior contacts: (endpoint index) -> (segment, projection)
    interior: dict[int, list[tuple[int, tuple[float, float]]]] = {}
    for i, (p, seg_i) in enumerate(endpoints):
        for j, seg in enumerate(lines):
            if j == seg_i:
                continue
            t, dist, proj = _project_onto(seg, p)
            if dist > radius:
                continue
            length = seg.length or 1.0
            margin = radius / length
            if margin < t < 1.0 - margin:
                interior.setdefault(i, []).append((j, proj))

    clusters: dict[int, list[int]] = {}
    for i in range(len(endpoints)):
        clusters.setdefault(find(i), []).append(i)

    junctions = []
    for members in clusters.values():
        pass_throughs: dict[int, tuple[float, float]] = {}
        for i in members:
            for seg_j, proj in interior.get(i, []):
                pass_throughs.setdefault(seg_j, proj)
        degree = len(members) + 2 * len(pass_throughs)
        if degree < 2:
            continue
        contact_pts = sorted(
            [endpoints[i][0] for i in members] + list(pass_throughs.values())
        )
        cx = sum(p[0] for p in contact_pts) / len(contact_pts)
        cy = sum(p[1] for p in contact_pts) / len(contact_pts)
        junctions.append(Junction(position=(cx, cy), degree=degree))
    junctions.sort(key=lambda j: (j.position[1], j.position[0]))
    return junctions
