"""Shared test fixtures: tiny synthetic images, masks, and drawing helpers."""

from __future__ import annotations

import numpy as np

from apxsim.vision import RasterImage, SegmentMask


def blank_image(w: int, h: int, color=(255, 255, 255)) -> np.ndarray:
    arr = np.zeros((h, w, 4), dtype=np.uint8)
    arr[:, :, 0] = color[0]
    arr[:, :, 1] = color[1]
    arr[:, :, 2] = color[2]
    arr[:, :, 3] = 255
    return arr


def fill_rect(arr: np.ndarray, x0, y0, x1, y1, color):
    arr[y0:y1, x0:x1, 0] = color[0]
    arr[y0:y1, x0:x1, 1] = color[1]
    arr[y0:y1, x0:x1, 2] = color[2]


def image_of(arr: np.ndarray) -> RasterImage:
    return RasterImage.from_array(arr)


def mask_from_coords(w: int, h: int, coords) -> SegmentMask:
    bits = np.zeros((h, w), dtype=bool)
    for x, y in coords:
        bits[y, x] = True
    return SegmentMask(bits)


def rect_mask(w: int, h: int, x0, y0, x1, y1) -> SegmentMask:
    bits = np.zeros((h, w), dtype=bool)
    bits[y0:y1, x0:x1] = True
    return SegmentMask(bits)


def random_blob_mask(rng: np.random.Generator, w: int = 64, h: int = 64) -> SegmentMask:
    """Connected random blob: union of a few overlapping filled discs."""
    bits = np.zeros((h, w), dtype=bool)
    cx = rng.integers(w // 4, 3 * w // 4)
    cy = rng.integers(h // 4, 3 * h // 4)
    yy, xx = np.mgrid[0:h, 0:w]
    for _ in range(int(rng.integers(2, 6))):
        r = int(rng.integers(4, min(w, h) // 4))
        bits |= (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
        cx = int(np.clip(cx + rng.integers(-r, r + 1), r + 1, w - r - 2))
        cy = int(np.clip(cy + rng.integers(-r, r + 1), r + 1, h - r - 2))
    return SegmentMask(bits)


def random_star_polygon(rng: np.random.Generator, n: int = 12, r_lo=10.0, r_hi=40.0):
    """Random simple polygon: star-shaped around the origin.

    Angular gaps are bounded well below 180 degrees; a wider gap would let
    the closing chord cross other wedges and break simplicity.
    """
    import math

    gaps = rng.uniform(0.4, 1.0, size=n)
    angles = 2 * math.pi * np.cumsum(gaps) / gaps.sum()
    radii = rng.uniform(r_lo, r_hi, size=n)
    pts = [(r * math.cos(a) + 50.0, r * math.sin(a) + 50.0) for a, r in zip(angles, radii)]
    return pts


def random_project(rng: np.random.Generator):
    """Random-but-valid project for persistence round-trip testing."""
    from apxsim.scene import Project
    from apxsim.vision import RasterImage

    w = int(rng.integers(40, 120))
    h = int(rng.integers(40, 120))
    arr = blank_image(w, h)
    fill_rect(arr, 5, 5, w // 2, h // 2, tuple(int(c) for c in rng.integers(0, 200, 3)))
    project = Project(id=f"p{rng.integers(0, 10**6)}", page=RasterImage.from_array(arr))
    project.sim_type = "kinematics"

    n_entities = int(rng.integers(1, 4))
    eids = []
    for _ in range(n_entities):
        x0 = int(rng.integers(0, w - 12))
        y0 = int(rng.integers(0, h - 12))
        bw = int(rng.integers(6, 12))
        bh = int(rng.integers(6, 12))
        mask = rect_mask(w, h, x0, y0, x0 + bw, y0 + bh)
        eids.append(project.add_entity(mask).id)

    project.assign_role(eids[0], "dynamic-object", {"mass": float(rng.uniform(0.5, 4.0))})
    if len(eids) > 1:
        project.assign_role(eids[1], "static-object", {"friction": float(rng.uniform(0, 1))})

    project.ingest_annotations({
        "tokens": [
            {"id": "t1", "value": round(float(rng.uniform(0.1, 9.9)), 2), "unit": "m",
             "bbox": [1, 1, 20, 9]},
        ],
    })
    project.create_binding("t1", f"{eids[0]}.mass", min_value=0.1, max_value=10.0)
    rec = project.create_recorder(f"{eids[0]}.mass", sample_period=0.02, window=5)
    t = 0.0
    for _ in range(int(rng.integers(0, 7))):
        t += float(rng.uniform(0.01, 0.2))
        project.record_tick(rec.id, t, float(rng.uniform(-1, 1)))
    return project


def random_resistive_netlist(rng: np.random.Generator):
    """Connected random network: spanning-tree resistors + chord resistors,
    one or two batteries on tree edges (so no source-only loops form)."""
    from apxsim.circuit import Component, Netlist

    n_nodes = int(rng.integers(2, 9))
    nodes = [f"n{i}" for i in range(n_nodes)]
    comps = []
    cid = 0

    tree_edges = []
    for i in range(1, n_nodes):
        j = int(rng.integers(0, i))
        tree_edges.append((nodes[j], nodes[i]))

    n_sources = int(rng.integers(1, 3))
    n_sources = min(n_sources, len(tree_edges))
    source_slots = rng.choice(len(tree_edges), size=n_sources, replace=False)
    for k, (a, b) in enumerate(tree_edges):
        if k in source_slots:
            v = float(rng.uniform(1.0, 24.0))
            plus = a if rng.integers(0, 2) == 0 else b
            comps.append(Component(f"c{cid}", "battery", v, a, b, plus=plus))
        else:
            comps.append(Component(f"c{cid}", "resistor", float(rng.uniform(1.0, 1000.0)), a, b))
        cid += 1

    extra = int(rng.integers(1, 2 * n_nodes))
    for _ in range(extra):
        i, j = rng.integers(0, n_nodes, size=2)
        if i == j:
            continue
        comps.append(Component(
            f"c{cid}", "resistor", float(rng.uniform(1.0, 1000.0)),
            nodes[int(i)], nodes[int(j)],
        ))
        cid += 1

    return Netlist(nodes=tuple(nodes), components=tuple(comps), ref=nodes[0])
