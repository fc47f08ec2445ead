"""Raster-to-vector pipeline: segmentation, contours, decomposition,
skeletons, and line/junction detection."""

from .contours import Contour, Polygon, centroid, mask_to_contours, signed_area, simplify_contour
from .decompose import convex_decompose
from .lines import (
    Junction,
    LineSegment,
    classify_angle,
    detect_junctions,
    detect_lines,
)
from .raster import (
    BoxPrompt,
    PointPrompt,
    RasterImage,
    SegmentMask,
    bounding_box,
    import_mask,
)
from .segmentation import segment_region
from .skeleton import Polyline, Skeleton, skeleton_to_polyline, skeletonize

__all__ = [
    "BoxPrompt",
    "Contour",
    "Junction",
    "LineSegment",
    "PointPrompt",
    "Polygon",
    "Polyline",
    "RasterImage",
    "SegmentMask",
    "Skeleton",
    "bounding_box",
    "centroid",
    "classify_angle",
    "convex_decompose",
    "detect_junctions",
    "detect_lines",
    "import_mask",
    "mask_to_contours",
    "segment_region",
    "signed_area",
    "simplify_contour",
    "skeleton_to_polyline",
    "skeletonize",
]
