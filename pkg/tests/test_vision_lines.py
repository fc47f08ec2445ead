import numpy as np

from apxsim.vision import LineSegment, detect_junctions, detect_lines

from helpers import blank_image, fill_rect, image_of


def ink_rect(arr, x0, y0, x1, y1):
    fill_rect(arr, x0, y0, x1, y1, (0, 0, 0))


def test_single_horizontal_rule():
    arr = blank_image(100, 100)
    ink_rect(arr, 10, 49, 90, 51)  # 2 px thick, (10,50)-(90,50)
    segs = detect_lines(image_of(arr))
    assert len(segs) == 1
    seg = segs[0]
    assert seg.orientation == "horizontal"
    assert abs(seg.p0[0] - 10) <= 2 and abs(seg.p0[1] - 50) <= 2
    assert abs(seg.p1[0] - 90) <= 2 and abs(seg.p1[1] - 50) <= 2


def test_blank_image_no_lines():
    assert detect_lines(image_of(blank_image(50, 50))) == []


def test_rectangle_outline_four_segments():
    arr = blank_image(120, 100)
    x0, y0, x1, y1 = 20, 20, 100, 80
    ink_rect(arr, x0, y0, x1, y0 + 2)
    ink_rect(arr, x0, y1 - 2, x1, y1)
    ink_rect(arr, x0, y0, x0 + 2, y1)
    ink_rect(arr, x1 - 2, y0, x1, y1)
    segs = detect_lines(image_of(arr))
    horiz = [s for s in segs if s.orientation == "horizontal"]
    vert = [s for s in segs if s.orientation == "vertical"]
    assert len(horiz) == 2 and len(vert) == 2
    corners = [(20, 20), (99, 20), (20, 79), (99, 79)]
    endpoints = [p for s in segs for p in (s.p0, s.p1)]
    for c in corners:
        assert any(abs(p[0] - c[0]) <= 2 and abs(p[1] - c[1]) <= 2 for p in endpoints)


def test_oblique_stroke():
    arr = blank_image(80, 80)
    for i in range(30):
        ink_rect(arr, 10 + i, 10 + i, 12 + i, 12 + i)
    segs = detect_lines(image_of(arr))
    assert len(segs) == 1
    assert segs[0].orientation == "oblique"


def test_synthetic_recall_axis_aligned():
    rng = np.random.default_rng(5)
    arr = blank_image(300, 300)
    truth = []
    # non-overlapping strokes on separated rows/columns
    rows = rng.choice(np.arange(10, 140), size=6, replace=False) * 2
    for y in rows[:3]:
        x0 = int(rng.integers(5, 100))
        x1 = x0 + int(rng.integers(8, 120))
        ink_rect(arr, x0, int(y), x1, int(y) + 2)
        truth.append(("horizontal", (x0, y + 0.5), (x1 - 1, y + 0.5)))
    cols = rng.choice(np.arange(10, 140), size=3, replace=False) * 2
    for x in cols:
        y0 = int(rng.integers(5, 100))
        y1 = y0 + int(rng.integers(8, 120))
        ink_rect(arr, int(x), y0, int(x) + 2, y1)
        truth.append(("vertical", (x + 0.5, y0), (x + 0.5, y1 - 1)))

    segs = detect_lines(image_of(arr))
    for orient, p0, p1 in truth:
        found = [
            s
            for s in segs
            if s.orientation == orient
            and abs(s.p0[0] - p0[0]) <= 2
            and abs(s.p0[1] - p0[1]) <= 2
            and abs(s.p1[0] - p1[0]) <= 2
            and abs(s.p1[1] - p1[1]) <= 2
        ]
        assert found, f"missed {orient} stroke {p0}-{p1}"


def test_junction_shared_endpoint():
    a = LineSegment((10, 10), (50, 10), "horizontal")
    b = LineSegment((50, 10), (50, 40), "vertical")
    js = detect_junctions([a, b])
    assert len(js) == 1
    assert js[0].degree == 2
    assert js[0].position == (50.0, 10.0)


def test_parallel_segments_no_junction():
    a = LineSegment((10, 10), (80, 10), "horizontal")
    b = LineSegment((10, 60), (80, 60), "horizontal")
    assert detect_junctions([a, b]) == []


def test_t_junction_degree_three():
    bar = LineSegment((10, 30), (90, 30), "horizontal")
    stem = LineSegment((50, 30), (50, 70), "vertical")
    js = detect_junctions([bar, stem])
    assert len(js) == 1
    assert js[0].degree == 3


def test_junction_permutation_invariance():
    segs = [
        LineSegment((10, 10), (50, 10), "horizontal"),
        LineSegment((50, 10), (50, 40), "vertical"),
        LineSegment((50, 40), (90, 40), "horizontal"),
        LineSegment((30, 10), (30, 5), "vertical"),
    ]
    ref = detect_junctions(segs)
    perm = detect_junctions(list(reversed(segs)))
    assert ref == perm
