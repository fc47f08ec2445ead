"""Frame rendering: flat-color polygon fills over the page, PNG or SVG out."""

from __future__ import annotations

import base64

import numpy as np

from ..kinematics.world import World
from ..vision.raster import RasterImage
from . import draw

DYNAMIC_COLOR = (220, 70, 50)
STATIC_COLOR = (90, 90, 110)
RAY_REAL = "#c83214"
RAY_VIRTUAL = "#1464c8"


def render_world_frame(page: RasterImage, world: World) -> np.ndarray:
    """Page bitmap with body polygons drawn at their current poses."""
    arr = page.to_array().copy()
    scale = world.pixel_scale
    for body in world.bodies.values():
        color = DYNAMIC_COLOR if body.is_dynamic else STATIC_COLOR
        pts = [(x / scale, y / scale) for x, y in body.world_outline()]
        draw.fill_polygon(arr, pts, color)
    return arr


def _svg_header(page: RasterImage) -> list[str]:
    png_b64 = base64.b64encode(page.to_png()).decode("ascii")
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{page.width}" '
        f'height="{page.height}" viewBox="0 0 {page.width} {page.height}">',
        f'<image href="data:image/png;base64,{png_b64}" x="0" y="0" '
        f'width="{page.width}" height="{page.height}"/>',
    ]


def _poly_points(pts) -> str:
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)


def world_svg(page: RasterImage, world: World) -> str:
    parts = _svg_header(page)
    parts.append('<g fill-opacity="0.55">')
    scale = world.pixel_scale
    for body in world.bodies.values():
        color = "#dc4632" if body.is_dynamic else "#5a5a6e"
        pts = [(x / scale, y / scale) for x, y in body.world_outline()]
        parts.append(f'<polygon points="{_poly_points(pts)}" fill="{color}"/>')
    parts.append("</g></svg>")
    return "".join(parts)


def rays_svg(page: RasterImage, ray_paths) -> str:
    """Optics overlay: solid real segments, dashed 6/4 virtual extensions."""
    parts = _svg_header(page)
    parts.append('<g fill="none" stroke-width="2">')
    for path in ray_paths:
        for seg in path.segments:
            dash = ' stroke-dasharray="6 4"' if seg.style == "virtual" else ""
            color = RAY_VIRTUAL if seg.style == "virtual" else RAY_REAL
            parts.append(
                f'<line x1="{seg.p0[0]:.2f}" y1="{seg.p0[1]:.2f}" '
                f'x2="{seg.p1[0]:.2f}" y2="{seg.p1[1]:.2f}" '
                f'stroke="{color}"{dash}/>'
            )
    parts.append("</g></svg>")
    return "".join(parts)


def animation_svg(page: RasterImage, paths, tracks, sprite_boxes) -> str:
    """SMIL motion: each tracked sprite loops along its extracted path."""
    parts = _svg_header(page)
    for track in tracks:
        path = paths[track.path_id]
        pts = list(path.points)
        if path.closed and pts:
            pts.append(pts[0])
        d = "M " + " L ".join(f"{x:.2f} {y:.2f}" for x, y in pts)
        duration = path.length / track.speed
        box = sprite_boxes.get(track.object_id)
        if box is None:
            continue
        w = box[2] - box[0]
        h = box[3] - box[1]
        parts.append(
            f'<rect x="{-w / 2:.1f}" y="{-h / 2:.1f}" width="{w:.1f}" height="{h:.1f}" '
            f'fill="#e68c1e" fill-opacity="0.8">'
            f'<animateMotion dur="{duration:.3f}s" repeatCount="indefinite" path="{d}"/>'
            f"</rect>"
        )
    parts.append("</svg>")
    return "".join(parts)
