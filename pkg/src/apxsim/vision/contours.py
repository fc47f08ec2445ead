"""Moore-neighbor contour tracing and Douglas-Peucker simplification.

Contours are ordered boundary pixel centers; outer boundaries are normalized
to positive shoelace area ("counter-clockwise" in the y-down pixel frame) and
hole boundaries to negative area.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import DegenerateResult
from .raster import SegmentMask

Point = tuple[float, float]

_EIGHT_CONN = np.ones((3, 3), dtype=bool)
_FOUR_CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)

# Clockwise Moore neighborhood starting west, offsets as (dy, dx).
_RING = ((0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1))
_RING_INDEX = {off: i for i, off in enumerate(_RING)}


@dataclass(frozen=True)
class Contour:
    points: tuple[Point, ...]
    closed: bool = True

    def __len__(self):
        return len(self.points)


def signed_area(points) -> float:
    """Shoelace area in the stored (x, y) frame; positive = CCW convention."""
    a = 0.0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        a += x0 * y1 - x1 * y0
    return a / 2.0


def centroid(points) -> Point:
    """Area centroid of a simple polygon (falls back to vertex mean if flat)."""
    a = 0.0
    cx = 0.0
    cy = 0.0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        w = x0 * y1 - x1 * y0
        a += w
        cx += (x0 + x1) * w
        cy += (y0 + y1) * w
    if abs(a) < 1e-12:
        return (
            sum(p[0] for p in points) / n,
            sum(p[1] for p in points) / n,
        )
    a *= 0.5
    return cx / (6.0 * a), cy / (6.0 * a)


class Polygon:
    """Simple polygon, vertices ordered to positive shoelace area."""

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        verts = [(float(x), float(y)) for x, y in vertices]
        verts = _dedupe_ring(verts)
        if len(verts) < 3:
            raise DegenerateResult("polygon needs at least 3 distinct vertices")
        if signed_area(verts) < 0:
            verts.reverse()
        self.vertices = tuple(verts)

    @property
    def signed_area(self) -> float:
        return signed_area(self.vertices)

    @property
    def area(self) -> float:
        return abs(signed_area(self.vertices))

    @property
    def centroid(self) -> Point:
        return centroid(self.vertices)

    def is_convex(self, tol: float = 1e-9) -> bool:
        return _is_convex_ring(self.vertices, tol)

    def is_simple(self) -> bool:
        return _is_simple_ring(self.vertices)

    def bounds(self):
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def __eq__(self, other):
        return isinstance(other, Polygon) and self.vertices == other.vertices

    def __repr__(self):
        return f"Polygon({len(self.vertices)} vertices, area={self.area:.3f})"


def _dedupe_ring(points):
    out = []
    for p in points:
        if not out or p != out[-1]:
            out.append(p)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _is_convex_ring(verts, tol=1e-9) -> bool:
    n = len(verts)
    scale = max(abs(c) for v in verts for c in v) or 1.0
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        cx, cy = verts[(i + 2) % n]
        cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if cross < -tol * scale * scale:
            return False
    return True


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a, b, p) -> bool:
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _segments_cross(p1, p2, q1, q2) -> bool:
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0 and _on_segment(q1, q2, p1):
        return True
    if d2 == 0 and _on_segment(q1, q2, p2):
        return True
    if d3 == 0 and _on_segment(p1, p2, q1):
        return True
    if d4 == 0 and _on_segment(p1, p2, q2):
        return True
    return False


def _is_simple_ring(verts) -> bool:
    n = len(verts)
    if len(set(verts)) != n:
        return False
    for i in range(n):
        a1, a2 = verts[i], verts[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # adjacent edges share a vertex by construction
            b1, b2 = verts[j], verts[(j + 1) % n]
            if _segments_cross(a1, a2, b1, b2):
                return False
    return True


def _moore_trace(fg: np.ndarray, start: tuple[int, int], backtrack: tuple[int, int]):
    """Boundary walk over foreground pixels, returning (y, x) sequence.

    `backtrack` must be a background cell adjacent to `start`; Jacob's
    criterion (re-entering start from the same backtrack) terminates closed
    walks.
    """
    h, w = fg.shape
    path = [start]
    p = start
    b = backtrack
    start_b = backtrack
    limit = 8 * int(fg.sum()) + 16
    for _ in range(limit):
        bi = _RING_INDEX[(b[0] - p[0], b[1] - p[1])]
        found = None
        prev = b
        for k in range(1, 9):
            dy, dx = _RING[(bi + k) % 8]
            q = (p[0] + dy, p[1] + dx)
            if 0 <= q[0] < h and 0 <= q[1] < w and fg[q[0], q[1]]:
                found = q
                break
            prev = q
        if found is None:
            return path  # isolated pixel
        if found == start and prev == start_b:
            return path
        path.append(found)
        b = prev
        p = found
    return path


def mask_to_contours(mask: SegmentMask) -> list[Contour]:
    """Closed boundary contours: one outer ring per 8-connected component
    (positive area), plus one negative-area ring per enclosed hole."""
    bits = mask.bits
    labels, n = ndimage.label(bits, structure=_EIGHT_CONN)
    bg_labels, bg_n = ndimage.label(~bits, structure=_FOUR_CONN)
    border = np.zeros(bg_n + 1, dtype=bool)
    for edge in (bg_labels[0, :], bg_labels[-1, :], bg_labels[:, 0], bg_labels[:, -1]):
        border[np.unique(edge)] = True

    hole_owner: dict[int, list[int]] = {}
    for hole_id in range(1, bg_n + 1):
        if border[hole_id]:
            continue
        ys, xs = np.nonzero(bg_labels == hole_id)
        order = np.lexsort((xs, ys))
        hy, hx = int(ys[order[0]]), int(xs[order[0]])
        owner = int(labels[hy - 1, hx])
        hole_owner.setdefault(owner, []).append(hole_id)

    contours: list[Contour] = []
    for comp_id in range(1, n + 1):
        comp = labels == comp_id
        ys, xs = np.nonzero(comp)
        order = np.lexsort((xs, ys))
        sy, sx = int(ys[order[0]]), int(xs[order[0]])
        walk = _moore_trace(comp, (sy, sx), (sy, sx - 1))
        pts = [(float(x), float(y)) for y, x in walk]
        if signed_area(pts) < 0:
            pts.reverse()
        contours.append(Contour(points=tuple(pts), closed=True))

        for hole_id in hole_owner.get(comp_id, []):
            hys, hxs = np.nonzero(bg_labels == hole_id)
            horder = np.lexsort((hxs, hys))
            hy, hx = int(hys[horder[0]]), int(hxs[horder[0]])
            walk = _moore_trace(comp, (hy - 1, hx), (hy, hx))
            pts = [(float(x), float(y)) for y, x in walk]
            if signed_area(pts) > 0:
                pts.reverse()
            contours.append(Contour(points=tuple(pts), closed=True))
    return contours


def _point_segment_dist(p, a, b) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 == 0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / seg2
    t = max(0.0, min(1.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _rdp(points, epsilon):
    if len(points) < 3:
        return list(points)
    a, b = points[0], points[-1]
    dmax = -1.0
    idx = 0
    for i in range(1, len(points) - 1):
        d = _point_segment_dist(points[i], a, b)
        if d > dmax:
            dmax = d
            idx = i
    if dmax > epsilon:
        left = _rdp(points[: idx + 1], epsilon)
        right = _rdp(points[idx:], epsilon)
        return left[:-1] + right
    return [a, b]


def _remove_collinear(ring):
    pts = list(ring)
    changed = True
    while changed and len(pts) > 3:
        changed = False
        out = []
        n = len(pts)
        for i in range(n):
            a = pts[(i - 1) % n]
            b = pts[i]
            c = pts[(i + 1) % n]
            if _orient(a, b, c) == 0:
                changed = True
                continue
            out.append(b)
        pts = out if len(out) >= 3 else pts
        if len(out) < 3:
            break
    return pts


def _simplify_ring(ring, epsilon):
    if epsilon <= 0:
        return _remove_collinear(ring)
    # split the closed ring at the two mutually farthest anchor candidates
    far = max(range(1, len(ring)), key=lambda i: (ring[i][0] - ring[0][0]) ** 2 + (ring[i][1] - ring[0][1]) ** 2)
    chain1 = ring[: far + 1]
    chain2 = ring[far:] + [ring[0]]
    out = _rdp(chain1, epsilon)[:-1] + _rdp(chain2, epsilon)[:-1]
    return _remove_collinear(out)


def simplify_contour(contour: Contour, epsilon: float) -> Polygon:
    """Douglas-Peucker reduction of a closed contour into a simple polygon.

    Keeps a subset of the original vertices, every dropped point within
    `epsilon` of the simplified chain. Self-intersecting results retry with
    halved epsilon before giving up.
    """
    if not contour.closed:
        raise ValueError("simplify_contour expects a closed contour")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    ring = _dedupe_ring([(float(x), float(y)) for x, y in contour.points])
    if len(ring) < 3:
        raise DegenerateResult("contour has fewer than 3 distinct points")

    eps = float(epsilon)
    for _ in range(32):
        pts = _simplify_ring(ring, eps)
        if len(pts) >= 3 and abs(signed_area(pts)) > 1e-9 and _is_simple_ring(pts):
            return Polygon(pts)
        if eps <= 0:
            break
        eps = 0.0 if eps < 1e-6 else eps / 2.0
    raise DegenerateResult("simplification collapsed the contour")
