import math

import numpy as np
import pytest

from apxsim.errors import NonPositiveObjectDistance
from apxsim.optics import (
    OpticalElement,
    OpticalObject,
    image_of,
    principal_rays,
    solve_mirror,
    solve_thin_lens,
)


def lens(f, x=500.0, axis=300.0):
    kind = "convex_lens" if f > 0 else "concave_lens"
    return OpticalElement(kind=kind, x=x, axis_y=axis, focal_length=f, aperture=80.0)


def mirror(f, x=500.0, axis=300.0):
    return OpticalElement(kind="mirror", x=x, axis_y=axis, focal_length=f, aperture=80.0)


def test_object_at_twice_focal_length():
    r = solve_thin_lens(200.0, 100.0)
    assert math.isclose(r.image_distance, 200.0, rel_tol=1e-12)
    assert math.isclose(r.magnification, -1.0, rel_tol=1e-12)
    assert r.nature == "real"


def test_object_inside_focal_length():
    r = solve_thin_lens(50.0, 100.0)
    assert math.isclose(r.image_distance, -100.0, rel_tol=1e-12)
    assert math.isclose(r.magnification, 2.0, rel_tol=1e-12)
    assert r.nature == "virtual"


def test_object_at_focal_length_is_at_infinity():
    assert solve_thin_lens(100.0, 100.0).nature == "at-infinity"


def test_non_positive_object_distance():
    with pytest.raises(NonPositiveObjectDistance):
        solve_thin_lens(0.0, 100.0)
    with pytest.raises(NonPositiveObjectDistance):
        solve_mirror(-5.0, 100.0)


def test_concave_mirror_at_center_of_curvature():
    r = solve_mirror(200.0, 100.0)
    assert math.isclose(r.image_distance, 200.0, rel_tol=1e-12)
    assert math.isclose(r.magnification, -1.0, rel_tol=1e-12)
    assert r.nature == "real"


def test_plane_mirror_limit():
    r = solve_mirror(123.0, 1e9)
    assert r.image_distance == -123.0
    assert r.magnification == 1.0
    assert r.nature == "virtual"


def test_convex_mirror_hand_computed():
    # 1/d_i = 1/f - 1/d_o = -1/100 - 1/100 => d_i = -50, m = +1/2
    r = solve_mirror(100.0, -100.0)
    assert math.isclose(r.image_distance, -50.0, rel_tol=1e-12)
    assert math.isclose(r.magnification, 0.5, rel_tol=1e-12)
    assert r.nature == "virtual"


def rays_terminal_point(paths):
    ends = {p.segments[-1].p1 for p in paths}
    assert len(ends) == 1, "both rays must terminate at the same image tip"
    return next(iter(ends))


def test_rays_meet_at_real_image_tip():
    el = lens(100.0)
    obj = OpticalObject(x=el.x - 200.0, height=40.0)
    paths = principal_rays(obj, el)
    assert len(paths) == 2
    x, y = rays_terminal_point(paths)
    assert math.isclose(x, el.x + 200.0, abs_tol=1e-9)
    assert math.isclose(y, el.axis_y + 40.0, abs_tol=1e-9)  # inverted: below axis
    assert all(seg.style == "real" for p in paths for seg in p.segments)


def test_rays_virtual_image_back_extension():
    el = lens(100.0)
    obj = OpticalObject(x=el.x - 50.0, height=30.0)
    paths = principal_rays(obj, el)
    x, y = rays_terminal_point(paths)
    assert x < el.x  # virtual image on the object's side
    for p in paths:
        assert p.segments[-1].style == "virtual"
        assert p.segments[0].style == "real"


def test_rays_share_endpoints_chain():
    el = lens(120.0)
    obj = OpticalObject(x=el.x - 300.0, height=25.0)
    for path in principal_rays(obj, el):
        for s0, s1 in zip(path.segments, path.segments[1:]):
            shared = {s0.p0, s0.p1} & {s1.p0, s1.p1}
            assert shared


def geometric_vs_algebraic(d_o, f, h_o, is_mirror=False):
    el = mirror(f) if is_mirror else lens(f)
    obj = OpticalObject(x=el.x - d_o, height=h_o)
    paths = principal_rays(obj, el)
    x, y = rays_terminal_point(paths)
    solver = solve_mirror(d_o, f, h_o) if is_mirror else solve_thin_lens(d_o, f, h_o)
    out_dir = -1.0 if is_mirror else 1.0
    expected_x = el.x + out_dir * solver.image_distance
    expected_y = el.axis_y - solver.image_height
    return math.hypot(x - expected_x, y - expected_y)


def test_consistency_sweep_lens_and_mirror():
    rng = np.random.default_rng(123)
    for _ in range(1000):
        f = float(rng.uniform(-400, 400))
        if abs(f) < 20:
            continue
        d_o = float(rng.uniform(10, 900))
        if f > 0 and abs(d_o - f) < 1.0:
            continue
        h_o = float(rng.uniform(5, 120))
        assert geometric_vs_algebraic(d_o, f, h_o) <= 1e-6
        assert geometric_vs_algebraic(d_o, f, h_o, is_mirror=True) <= 1e-6


def test_reciprocity():
    rng = np.random.default_rng(9)
    for _ in range(200):
        f = float(rng.uniform(20, 300))
        d_o = float(rng.uniform(f + 2.0, f * 10))
        r = solve_thin_lens(d_o, f)
        assert r.nature == "real"
        back = solve_thin_lens(r.image_distance, f)
        assert abs(back.image_distance - d_o) <= 1e-9 * max(1.0, d_o)


def test_monotonicity_convex_lens():
    f = 150.0
    d_prev = None
    for d_o in np.linspace(f + 5, f * 20, 300):
        r = solve_thin_lens(float(d_o), f)
        if d_prev is not None:
            assert r.image_distance < d_prev
        d_prev = r.image_distance


def test_image_of_transforms():
    el = lens(100.0)
    r, t = image_of(OpticalObject(x=el.x - 200.0, height=40.0), el)
    assert t.scale_y == -1.0 and t.scale_x == 1.0  # flipped, same size

    r, t = image_of(OpticalObject(x=el.x - 50.0, height=40.0), el)
    assert t.scale_y == 2.0  # upright, doubled

    r, t = image_of(OpticalObject(x=el.x - 100.0, height=40.0), el)
    assert r.nature == "at-infinity" and t is None
