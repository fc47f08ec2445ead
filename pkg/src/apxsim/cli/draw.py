"""Flat-color rasterization for synthetic diagrams and frame rendering."""

from __future__ import annotations

import math

import numpy as np

BLACK = (0, 0, 0)
WHITE = (255, 255, 255)


def canvas(width: int, height: int, color=WHITE) -> np.ndarray:
    arr = np.zeros((height, width, 4), dtype=np.uint8)
    arr[:, :, 0], arr[:, :, 1], arr[:, :, 2] = color
    arr[:, :, 3] = 255
    return arr


def _paint(arr, x0, y0, x1, y1, color):
    h, w = arr.shape[:2]
    x0 = max(0, int(x0))
    y0 = max(0, int(y0))
    x1 = min(w, int(x1))
    y1 = min(h, int(y1))
    if x0 < x1 and y0 < y1:
        arr[y0:y1, x0:x1, 0] = color[0]
        arr[y0:y1, x0:x1, 1] = color[1]
        arr[y0:y1, x0:x1, 2] = color[2]


def draw_line(arr, p0, p1, thickness: int = 2, color=BLACK):
    """Axis-aligned lines get crisp rectangle fills; oblique lines are
    stamped along their length."""
    x0, y0 = p0
    x1, y1 = p1
    half = thickness / 2.0
    if y0 == y1:
        xa, xb = sorted((x0, x1))
        _paint(arr, xa, y0 - half, xb + 1, y0 - half + thickness, color)
        return
    if x0 == x1:
        ya, yb = sorted((y0, y1))
        _paint(arr, x0 - half, ya, x0 - half + thickness, yb + 1, color)
        return
    length = math.hypot(x1 - x0, y1 - y0)
    steps = max(2, int(length * 2))
    for k in range(steps + 1):
        t = k / steps
        cx = x0 + t * (x1 - x0)
        cy = y0 + t * (y1 - y0)
        _paint(arr, cx - half, cy - half, cx - half + thickness, cy - half + thickness, color)


def draw_disc(arr, center, radius: int, color=BLACK):
    cx, cy = center
    h, w = arr.shape[:2]
    y0 = max(0, int(cy - radius))
    y1 = min(h, int(cy + radius + 1))
    x0 = max(0, int(cx - radius))
    x1 = min(w, int(cx + radius + 1))
    yy, xx = np.mgrid[y0:y1, x0:x1]
    mask = (xx - cx) ** 2 + (yy - cy) ** 2 <= radius * radius
    for c in range(3):
        arr[y0:y1, x0:x1, c] = np.where(mask, color[c], arr[y0:y1, x0:x1, c])


def fill_polygon(arr, points, color):
    """Scanline fill of a simple polygon, pixel-center sampling."""
    ys = [p[1] for p in points]
    y0 = max(0, int(math.floor(min(ys))))
    y1 = min(arr.shape[0] - 1, int(math.ceil(max(ys))))
    n = len(points)
    for y in range(y0, y1 + 1):
        yc = y + 0.5
        xs = []
        for i in range(n):
            ax, ay = points[i]
            bx, by = points[(i + 1) % n]
            if (ay <= yc < by) or (by <= yc < ay):
                t = (yc - ay) / (by - ay)
                xs.append(ax + t * (bx - ax))
        xs.sort()
        for xa, xb in zip(xs[0::2], xs[1::2]):
            _paint(arr, math.ceil(xa - 0.5), y, math.floor(xb - 0.5) + 1, y + 1, color)


def draw_zigzag(arr, x: float, y: float, length: float = 60, amp: float = 7,
                thickness: int = 2, vertical: bool = False, color=BLACK):
    """Resistor glyph: oblique strokes between the two terminals.

    Returns the tight bbox (x0, y0, x1, y1).
    """
    n_peaks = 5
    step = length / (n_peaks + 1)
    pts = [(0.0, 0.0)]
    for k in range(n_peaks):
        pts.append((step * (k + 0.5) + step / 2, amp if k % 2 == 0 else -amp))
    pts.append((length, 0.0))

    def to_page(p):
        if vertical:
            return (x + p[1], y + p[0])
        return (x + p[0], y + p[1])

    page_pts = [to_page(p) for p in pts]
    for a, b in zip(page_pts, page_pts[1:]):
        draw_line(arr, a, b, thickness=thickness, color=color)
    xs = [p[0] for p in page_pts]
    ys = [p[1] for p in page_pts]
    return (min(xs) - 1, min(ys) - 1, max(xs) + 2, max(ys) + 2)


def draw_battery(arr, cx: float, cy: float, vertical_plates: bool = True,
                 plus_first: bool = True, color=BLACK):
    """Two-plate battery glyph. `plus_first` puts the long (+) plate on the
    lower-coordinate side of the flow axis. Returns (bbox, plus_point)."""
    long_h, short_h = 24, 10
    gap = 8
    off = gap / 2
    if vertical_plates:  # horizontal flow
        x_long = cx - off if plus_first else cx + off
        x_short = cx + off if plus_first else cx - off
        draw_line(arr, (x_long, cy - long_h / 2), (x_long, cy + long_h / 2), 2, color)
        draw_line(arr, (x_short, cy - short_h / 2), (x_short, cy + short_h / 2), 2, color)
        bbox = (cx - off - 2, cy - long_h / 2 - 1, cx + off + 2, cy + long_h / 2 + 1)
        plus = (bbox[0], cy) if plus_first else (bbox[2], cy)
    else:  # vertical flow, horizontal plates
        y_long = cy - off if plus_first else cy + off
        y_short = cy + off if plus_first else cy - off
        draw_line(arr, (cx - long_h / 2, y_long), (cx + long_h / 2, y_long), 2, color)
        draw_line(arr, (cx - short_h / 2, y_short), (cx + short_h / 2, y_short), 2, color)
        bbox = (cx - long_h / 2 - 1, cy - off - 2, cx + long_h / 2 + 1, cy + off + 2)
        plus = (cx, bbox[1]) if plus_first else (cx, bbox[3])
    return bbox, plus


def draw_capacitor(arr, cx: float, cy: float, vertical_plates: bool = True, color=BLACK):
    plate = 20
    gap = 8
    off = gap / 2
    if vertical_plates:
        for x in (cx - off, cx + off):
            draw_line(arr, (x, cy - plate / 2), (x, cy + plate / 2), 2, color)
        return (cx - off - 2, cy - plate / 2 - 1, cx + off + 2, cy + plate / 2 + 1)
    for y in (cy - off, cy + off):
        draw_line(arr, (cx - plate / 2, y), (cx + plate / 2, y), 2, color)
    return (cx - plate / 2 - 1, cy - off - 2, cx + plate / 2 + 1, cy + off + 2)
