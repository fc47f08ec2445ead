"""Prompt-driven segmentation: color-tolerance flood fill with seed competition.

A region is grown from each prompt as the connected component (4-connectivity)
of pixels whose RGB distance to the seed color is within tolerance. The mask
is the union of positive regions minus negative territory; pixels claimed by
both sides go to the nearest prompt (squared Euclidean distance between pixel
centers, ties to the negative side).
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from ..errors import EmptyMask, NoPositivePrompt
from .raster import BoxPrompt, PointPrompt, RasterImage, SegmentMask

DEFAULT_COLOR_TOLERANCE = 32.0

_FOUR_CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


def _flood_region(rgb: np.ndarray, x: int, y: int, tolerance: float) -> np.ndarray:
    seed_color = rgb[y, x].astype(np.int64)
    dist2 = ((rgb.astype(np.int64) - seed_color) ** 2).sum(axis=-1)
    within = dist2 <= int(tolerance) ** 2 if float(tolerance).is_integer() else dist2 <= tolerance**2
    labels, _ = ndimage.label(within, structure=_FOUR_CONN)
    return labels == labels[y, x]


def _nearest_is_positive(
    pos_seeds: Sequence[tuple[int, int]],
    neg_seeds: Sequence[tuple[int, int]],
    shape: tuple[int, int],
) -> np.ndarray:
    h, w = shape
    ys, xs = np.mgrid[0:h, 0:w]

    def min_dist2(seeds):
        acc = None
        for sx, sy in seeds:
            d = (xs - sx) ** 2 + (ys - sy) ** 2
            acc = d if acc is None else np.minimum(acc, d)
        return acc

    dpos = min_dist2(pos_seeds)
    dneg = min_dist2(neg_seeds)
    return dpos < dneg  # ties go to the negative side


def segment_region(
    image: RasterImage,
    prompts: Sequence[PointPrompt],
    box: Optional[BoxPrompt] = None,
    tolerance: float = DEFAULT_COLOR_TOLERANCE,
) -> SegmentMask:
    positives = [p for p in prompts if p.polarity == "positive"]
    negatives = [p for p in prompts if p.polarity == "negative"]
    if not positives:
        raise NoPositivePrompt("segmentation needs at least one positive prompt")
    for p in prompts:
        if not image.contains(p.x, p.y):
            raise ValueError(f"prompt ({p.x}, {p.y}) outside image bounds")
    if box is not None:
        if not (image.contains(box.x0, box.y0) and box.x1 <= image.width and box.y1 <= image.height):
            raise ValueError("box outside image bounds")

    rgb = image.rgb()
    pos_union = np.zeros((image.height, image.width), dtype=bool)
    for p in positives:
        pos_union |= _flood_region(rgb, p.x, p.y, tolerance)
    neg_union = np.zeros_like(pos_union)
    for p in negatives:
        neg_union |= _flood_region(rgb, p.x, p.y, tolerance)

    mask = pos_union & ~neg_union
    contested = pos_union & neg_union
    if contested.any():
        keep = _nearest_is_positive(
            [(p.x, p.y) for p in positives],
            [(p.x, p.y) for p in negatives],
            pos_union.shape,
        )
        mask |= contested & keep

    if box is not None:
        clip = np.zeros_like(mask)
        clip[box.y0 : box.y1, box.x0 : box.x1] = True
        mask &= clip

    if not mask.any():
        raise EmptyMask("segmentation produced zero pixels")
    return SegmentMask(mask, source="generated")
