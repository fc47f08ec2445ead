"""Rigid bodies built from polygonized segments.

World units are meters (pixel coordinates scaled by the world's pixel scale),
y-down to match page space; gravity therefore points toward +y.
"""

from __future__ import annotations

import math

from ..errors import DegeneratePolygon
from ..vision.contours import Polygon
from ..vision.decompose import convex_decompose
from ..vision.raster import SegmentMask, bounding_box

DEFAULT_PIXEL_SCALE = 0.01  # meters per pixel


def polygon_mass_properties(vertices, mass: float):
    """Area, centroid and moment of inertia about the centroid for a simple
    polygon with uniform density summing to `mass`."""
    a2 = 0.0
    cx = 0.0
    cy = 0.0
    inertia_o = 0.0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        cross = x0 * y1 - x1 * y0
        a2 += cross
        cx += (x0 + x1) * cross
        cy += (y0 + y1) * cross
        inertia_o += cross * (x0 * x0 + x0 * x1 + x1 * x1 + y0 * y0 + y0 * y1 + y1 * y1)
    area = a2 / 2.0
    if abs(area) < 1e-12:
        raise DegeneratePolygon("polygon area is zero")
    cx /= 3.0 * a2
    cy /= 3.0 * a2
    density = mass / abs(area)
    inertia_o = density * abs(inertia_o) / 12.0
    inertia_c = inertia_o - mass * (cx * cx + cy * cy)
    return abs(area), (cx, cy), inertia_c


class Body:
    """Convex-piece rigid body; static bodies never move."""

    __slots__ = (
        "id", "role", "pieces", "outline",
        "px", "py", "angle", "vx", "vy", "omega",
        "mass", "inv_mass", "inertia", "inv_inertia",
        "friction", "restitution", "lock_rotation", "sprite",
        "fx", "fy", "torque",
    )

    def __init__(self, id, role, pieces, outline, position, mass=None, inertia=None,
                 friction=0.5, restitution=0.0, lock_rotation=False, sprite=None):
        self.id = id
        self.role = role
        self.pieces = pieces      # local-frame convex rings, centroid at origin
        self.outline = outline    # local-frame full outline (for AABB/rendering)
        self.px, self.py = position
        self.angle = 0.0
        self.vx = self.vy = self.omega = 0.0
        if role == "dynamic":
            self.mass = float(mass)
            self.inertia = float(inertia)
            self.inv_mass = 1.0 / self.mass
            self.inv_inertia = 0.0 if lock_rotation else 1.0 / self.inertia
        else:
            self.mass = None
            self.inertia = None
            self.inv_mass = 0.0
            self.inv_inertia = 0.0
        self.friction = float(friction)
        self.restitution = float(restitution)
        self.lock_rotation = bool(lock_rotation)
        self.sprite = sprite
        self.fx = self.fy = self.torque = 0.0

    @property
    def is_dynamic(self) -> bool:
        return self.role == "dynamic"

    def to_world(self, point):
        c = math.cos(self.angle)
        s = math.sin(self.angle)
        x, y = point
        return (self.px + c * x - s * y, self.py + s * x + c * y)

    def velocity_at(self, world_point):
        rx = world_point[0] - self.px
        ry = world_point[1] - self.py
        return (self.vx - self.omega * ry, self.vy + self.omega * rx)

    def world_pieces(self):
        return [[self.to_world(v) for v in piece] for piece in self.pieces]

    def world_outline(self):
        return [self.to_world(v) for v in self.outline]

    def aabb(self):
        xs = []
        ys = []
        for x, y in self.world_outline():
            xs.append(x)
            ys.append(y)
        return min(xs), min(ys), max(xs), max(ys)

    def set_mass(self, mass: float):
        if not self.is_dynamic:
            raise ValueError("mass applies to dynamic bodies only")
        ratio = mass / self.mass
        self.mass = mass
        self.inertia = self.inertia * ratio  # uniform density: inertia scales with mass
        self.inv_mass = 1.0 / mass
        self.inv_inertia = 0.0 if self.lock_rotation else 1.0 / self.inertia

    def clone(self) -> "Body":
        b = Body.__new__(Body)
        for name in Body.__slots__:
            value = getattr(self, name)
            if name in ("pieces", "outline"):
                value = [list(p) for p in value] if name == "pieces" else list(value)
            setattr(b, name, value)
        return b


def build_body(
    polygon: Polygon,
    mask: SegmentMask,
    role: str,
    params: dict | None = None,
    pixel_scale: float = DEFAULT_PIXEL_SCALE,
    body_id: str = "body",
) -> Body:
    """Create a body whose world AABB matches the mask's pixel AABB.

    The polygon is stretched onto the mask bounding box (boundary tracing
    runs through pixel centers, half a pixel inside the true extent), scaled
    to meters, decomposed into convex pieces and re-centered on its area
    centroid.
    """
    params = dict(params or {})
    if polygon.area < 4.0:
        raise DegeneratePolygon(f"polygon area {polygon.area:.2f} px^2 below minimum")
    box = bounding_box(mask)
    minx, miny, maxx, maxy = polygon.bounds()
    if maxx - minx < 1e-9 or maxy - miny < 1e-9:
        raise DegeneratePolygon("polygon is flat")
    sx = box.width / (maxx - minx)
    sy = box.height / (maxy - miny)
    mapped = [
        (
            (box.x0 + (x - minx) * sx) * pixel_scale,
            (box.y0 + (y - miny) * sy) * pixel_scale,
        )
        for x, y in polygon.vertices
    ]

    mass = float(params.get("mass", 1.0))
    if role == "dynamic" and mass <= 0:
        raise DegeneratePolygon("dynamic body mass must be > 0")
    area, centroid, inertia = polygon_mass_properties(mapped, mass if role == "dynamic" else 1.0)

    meter_poly = Polygon(mapped)
    pieces = [
        [(vx - centroid[0], vy - centroid[1]) for vx, vy in piece.vertices]
        for piece in convex_decompose(meter_poly)
    ]
    outline = [(vx - centroid[0], vy - centroid[1]) for vx, vy in meter_poly.vertices]

    return Body(
        id=body_id,
        role=role,
        pieces=pieces,
        outline=outline,
        position=centroid,
        mass=mass if role == "dynamic" else None,
        inertia=inertia if role == "dynamic" else None,
        friction=float(params.get("friction", 0.5)),
        restitution=float(params.get("restitution", 0.0)),
        lock_rotation=bool(params.get("lock_rotation", False)),
        sprite=params.get("sprite"),
    )
