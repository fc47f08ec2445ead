import math

import numpy as np
import pytest

from apxsim.errors import DegeneratePolygon
from apxsim.kinematics import build_body, polygon_mass_properties
from apxsim.vision import SegmentMask, bounding_box, mask_to_contours, simplify_contour

from helpers import rect_mask


def polygon_of(mask, epsilon=0.0):
    return simplify_contour(mask_to_contours(mask)[0], epsilon)


def test_square_body_inertia_matches_rectangle_formula():
    mask = rect_mask(32, 32, 10, 10, 20, 20)
    body = build_body(polygon_of(mask), mask, "dynamic", {"mass": 1.0}, body_id="b")
    assert len(body.pieces) == 1
    x0, y0, x1, y1 = body.aabb()
    assert math.isclose(x1 - x0, 0.10, abs_tol=1e-12)
    assert math.isclose(y1 - y0, 0.10, abs_tol=1e-12)
    expected = 1.0 * (0.01 + 0.01) / 12.0
    assert math.isclose(body.inertia, expected, rel_tol=1e-9)


def test_static_body_has_no_mass_fields():
    mask = rect_mask(32, 32, 10, 10, 20, 20)
    body = build_body(polygon_of(mask), mask, "static", body_id="s")
    assert body.mass is None and body.inertia is None
    assert body.inv_mass == 0.0 and body.inv_inertia == 0.0


def test_aabb_alignment_with_mask_bbox():
    rng = np.random.default_rng(3)
    for _ in range(10):
        x0 = int(rng.integers(2, 10))
        y0 = int(rng.integers(2, 10))
        w = int(rng.integers(5, 18))
        h = int(rng.integers(5, 18))
        mask = rect_mask(40, 40, x0, y0, x0 + w, y0 + h)
        body = build_body(polygon_of(mask), mask, "dynamic", {"mass": 2.0}, body_id="b")
        box = bounding_box(mask)
        bx0, by0, bx1, by1 = body.aabb()
        scale = 0.01
        assert abs(bx0 - box.x0 * scale) <= 1e-9
        assert abs(by0 - box.y0 * scale) <= 1e-9
        assert abs(bx1 - box.x1 * scale) <= 1e-9
        assert abs(by1 - box.y1 * scale) <= 1e-9


def test_l_shape_centroid_matches_pixel_average():
    bits = np.zeros((40, 40), dtype=bool)
    bits[10:30, 10:20] = True   # vertical bar
    bits[20:30, 10:35] = True   # foot
    mask = SegmentMask(bits)
    body = build_body(polygon_of(mask), mask, "dynamic", {"mass": 2.0}, body_id="L")

    # centroid equals area-weighted centroid of the convex pieces
    total = 0.0
    cx = cy = 0.0
    for piece in body.pieces:
        n = len(piece)
        a = sum(piece[i][0] * piece[(i + 1) % n][1] - piece[(i + 1) % n][0] * piece[i][1] for i in range(n)) / 2
        px = sum(
            (piece[i][0] + piece[(i + 1) % n][0])
            * (piece[i][0] * piece[(i + 1) % n][1] - piece[(i + 1) % n][0] * piece[i][1])
            for i in range(n)
        ) / (6 * a)
        py = sum(
            (piece[i][1] + piece[(i + 1) % n][1])
            * (piece[i][0] * piece[(i + 1) % n][1] - piece[(i + 1) % n][0] * piece[i][1])
            for i in range(n)
        ) / (6 * a)
        total += a
        cx += px * a
        cy += py * a
    cx /= total
    cy /= total
    # pieces live in the local frame, centroid at origin
    assert abs(cx) <= 1e-9 and abs(cy) <= 1e-9

    # and the world centroid tracks the pixel-average of the mask
    ys, xs = np.nonzero(mask.bits)
    pix_cx = float(xs.mean()) * 0.01
    pix_cy = float(ys.mean()) * 0.01
    assert abs(body.px - pix_cx) <= 0.01  # within one pixel
    assert abs(body.py - pix_cy) <= 0.01


def test_degenerate_polygon_rejected():
    mask = rect_mask(16, 16, 5, 5, 7, 7)  # 2x2 px traces a ring of area 1 < 4
    with pytest.raises(DegeneratePolygon):
        build_body(polygon_of(mask), mask, "dynamic", {"mass": 1.0})


def test_mass_properties_rectangle_closed_form():
    verts = [(0.0, 0.0), (0.4, 0.0), (0.4, 0.2), (0.0, 0.2)]
    area, c, inertia = polygon_mass_properties(verts, 3.0)
    assert math.isclose(area, 0.08, rel_tol=1e-12)
    assert math.isclose(c[0], 0.2, rel_tol=1e-12)
    assert math.isclose(c[1], 0.1, rel_tol=1e-12)
    assert math.isclose(inertia, 3.0 * (0.4**2 + 0.2**2) / 12.0, rel_tol=1e-9)
