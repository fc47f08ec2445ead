import math

import numpy as np
import pytest

from apxsim.errors import DegenerateResult
from apxsim.vision import Contour, mask_to_contours, signed_area, simplify_contour
from apxsim.vision.contours import _point_segment_dist

from helpers import mask_from_coords, random_blob_mask, rect_mask


def test_solid_square_single_contour():
    mask = rect_mask(20, 20, 4, 4, 14, 14)
    contours = mask_to_contours(mask)
    assert len(contours) == 1
    c = contours[0]
    assert c.closed
    assert signed_area(c.points) > 0
    xs = [p[0] for p in c.points]
    ys = [p[1] for p in c.points]
    assert (min(xs), min(ys), max(xs), max(ys)) == (4, 4, 13, 13)


def test_two_disjoint_squares():
    bits = np.zeros((30, 30), dtype=bool)
    bits[2:8, 2:8] = True
    bits[15:25, 15:25] = True
    from apxsim.vision import SegmentMask

    contours = mask_to_contours(SegmentMask(bits))
    assert len(contours) == 2
    assert all(signed_area(c.points) > 0 for c in contours)


def test_annulus_hole_orientation_and_area():
    bits = np.zeros((40, 40), dtype=bool)
    bits[5:35, 5:35] = True
    bits[15:25, 15:25] = False  # 10x10 hole
    from apxsim.vision import SegmentMask

    mask = SegmentMask(bits)
    contours = mask_to_contours(mask)
    assert len(contours) == 2
    outer = [c for c in contours if signed_area(c.points) > 0]
    inner = [c for c in contours if signed_area(c.points) < 0]
    assert len(outer) == 1 and len(inner) == 1

    hole_pixels = 100
    area_diff = abs(signed_area(outer[0].points)) - abs(signed_area(inner[0].points))
    enclosed_band = _perimeter(outer[0].points) + _perimeter(inner[0].points)
    # enclosed areas differ by the hole area up to the boundary band
    assert abs(area_diff - (mask.pixel_count)) <= enclosed_band


def _perimeter(points):
    total = 0.0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        total += math.hypot(x1 - x0, y1 - y0)
    return total


def test_mask_contour_area_agreement_property():
    rng = np.random.default_rng(42)
    for _ in range(20):
        mask = random_blob_mask(rng)
        contours = mask_to_contours(mask)
        area = 0.0
        perimeter = 0.0
        for c in contours:
            poly = simplify_contour(c, 0.5)
            sign = 1.0 if signed_area(c.points) > 0 else -1.0
            area += sign * poly.area
            perimeter += _perimeter(c.points)
        assert abs(mask.pixel_count - area) <= perimeter


def test_simplify_epsilon_zero_removes_only_collinear():
    mask = rect_mask(20, 20, 4, 4, 14, 14)
    c = mask_to_contours(mask)[0]
    poly = simplify_contour(c, 0.0)
    assert len(poly.vertices) == 4
    assert set(poly.vertices) == {(4.0, 4.0), (13.0, 4.0), (13.0, 13.0), (4.0, 13.0)}


def test_simplify_square_staircase():
    mask = rect_mask(40, 40, 8, 8, 32, 32)
    c = mask_to_contours(mask)[0]
    poly = simplify_contour(c, 1.5)
    assert len(poly.vertices) == 4


def test_simplify_noisy_circle_max_deviation_oracle():
    rng = np.random.default_rng(7)
    pts = []
    for k in range(240):
        ang = 2 * math.pi * k / 240
        r = 50.0 + rng.uniform(-1.0, 1.0)
        pts.append((60 + r * math.cos(ang), 60 + r * math.sin(ang)))
    contour = Contour(points=tuple(pts), closed=True)
    poly = simplify_contour(contour, 3.0)
    assert 3 <= len(poly.vertices) < len(pts)
    # brute-force point-to-chain distance for every original point
    verts = poly.vertices
    for p in pts:
        d = min(
            _point_segment_dist(p, verts[i], verts[(i + 1) % len(verts)])
            for i in range(len(verts))
        )
        assert d <= 3.0 + 1e-9
    # vertices are a subset of the original points
    assert set(poly.vertices).issubset(set(pts))


def test_simplify_degenerate():
    contour = Contour(points=((0.0, 0.0), (1.0, 0.0), (2.0, 0.0)), closed=True)
    with pytest.raises(DegenerateResult):
        simplify_contour(contour, 1.0)


def test_simplify_requires_closed():
    contour = Contour(points=((0.0, 0.0), (5.0, 1.0), (9.0, 0.0)), closed=False)
    with pytest.raises(ValueError):
        simplify_contour(contour, 1.0)
