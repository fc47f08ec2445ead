"""Thin-lens and mirror solver with principal-ray construction.

Page coordinates: x right, y down; the optical axis is the horizontal line
y = element.axis_y. Heights are measured upward from the axis (tip above the
axis has positive height, smaller y). Sign conventions: for a lens, image
distance d_i > 0 on the far side (real); for a mirror, d_i > 0 on the object
side (real, reflected). f > 0 converging (convex lens / concave mirror).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NonPositiveObjectDistance

PLANE_MIRROR_F = 1e9       # |f| at or above this is treated as a plane mirror
SINGULAR_MARGIN_PX = 1.0   # |d_o - f| below this is reported at-infinity
DEFAULT_CANVAS_MARGIN = 2000.0


@dataclass(frozen=True)
class OpticalElement:
    kind: str            # convex_lens | concave_lens | mirror
    x: float             # axis position of the element plane, px
    axis_y: float        # optical axis height on the page, px
    focal_length: float  # signed, px; f > 0 converging
    aperture: float      # half-height, px

    def __post_init__(self):
        if self.kind not in ("convex_lens", "concave_lens", "mirror"):
            raise ValueError(f"bad element kind {self.kind!r}")
        if self.focal_length == 0:
            raise ValueError("focal length must be nonzero")
        if self.aperture <= 0:
            raise ValueError("aperture must be positive")

    @property
    def is_mirror(self) -> bool:
        return self.kind == "mirror"


@dataclass(frozen=True)
class OpticalObject:
    x: float        # base position on the axis, px (left of the element)
    height: float   # tip height above the axis, px
    sprite: str | None = None

    def __post_init__(self):
        if self.height <= 0:
            raise ValueError("object height must be positive")


@dataclass(frozen=True)
class ImageResult:
    image_distance: float | None  # px, signed; None when at infinity
    image_height: float | None
    magnification: float | None
    nature: str  # real | virtual | at-infinity


@dataclass(frozen=True)
class RaySegment:
    p0: tuple[float, float]
    p1: tuple[float, float]
    style: str  # real | virtual


@dataclass(frozen=True)
class RayPath:
    segments: tuple[RaySegment, ...]


def _solve(d_o: float, f: float, h_o: float) -> ImageResult:
    if d_o <= 0:
        raise NonPositiveObjectDistance(f"object distance must be > 0, got {d_o}")
    if f > 0 and abs(d_o - f) < SINGULAR_MARGIN_PX:
        return ImageResult(None, None, None, "at-infinity")
    inv = 1.0 / f - 1.0 / d_o
    if abs(inv) < 1e-12:
        return ImageResult(None, None, None, "at-infinity")
    d_i = 1.0 / inv
    m = -d_i / d_o
    return ImageResult(d_i, m * h_o, m, "real" if d_i > 0 else "virtual")


def solve_thin_lens(d_o: float, f: float, h_o: float = 1.0) -> ImageResult:
    """1/f = 1/d_o + 1/d_i with real images on the far side (d_i > 0)."""
    return _solve(d_o, f, h_o)


def solve_mirror(d_o: float, f: float, h_o: float = 1.0) -> ImageResult:
    """Mirror equation; real images form back on the object side."""
    if d_o <= 0:
        raise NonPositiveObjectDistance(f"object distance must be > 0, got {d_o}")
    if abs(f) >= PLANE_MIRROR_F:
        return ImageResult(-d_o, h_o, 1.0, "virtual")  # plane mirror limit
    return _solve(d_o, f, h_o)


def principal_rays(
    obj: OpticalObject,
    element: OpticalElement,
    canvas_margin: float = DEFAULT_CANVAS_MARGIN,
) -> list[RayPath]:
    """The two construction rays from the object tip.

    Lens: (1) parallel-then-focal, (2) undeviated through the center.
    Mirror: (1) parallel-then-focal, (2) reflected at the pole. Each path runs
    tip -> element -> image tip; the image leg is virtual-styled when the
    image is virtual, and clipped at `canvas_margin` when at infinity.
    """
    d_o = element.x - obj.x
    if d_o <= 0:
        raise NonPositiveObjectDistance("object must sit left of the element")
    h_o = obj.height
    f = element.focal_length

    ex = element.x
    ay = element.axis_y
    tip = (obj.x, ay - h_o)
    hit_parallel = (ex, ay - h_o)   # parallel ray meets the element at tip height
    hit_center = (ex, ay)           # center of lens / pole of mirror

    # leftward for mirrors, rightward for lenses
    out_dir = -1.0 if element.is_mirror else 1.0

    # textbook construction slopes (height gained per px travelled outward)
    slope_parallel = -h_o / f if abs(f) < PLANE_MIRROR_F else 0.0
    slope_center = -h_o / d_o

    # geometric image point: intersection of the two outgoing ray lines
    # h1(s) = h_o + slope_parallel * s ; h2(s) = slope_center * s
    denom = slope_center - slope_parallel
    if abs(denom) < 1e-15:
        s_image = None
    else:
        s_image = h_o / denom
        if abs(s_image) > 100.0 * canvas_margin:
            s_image = None

    tip_img = None
    if s_image is not None:
        # shared terminal point, evaluated once on the center-ray line
        tip_img = (ex + out_dir * s_image, ay - slope_center * s_image)

    def ray(hit, slope):
        segments = [RaySegment(tip, hit, "real")]
        h_hit = ay - hit[1]
        if tip_img is None:
            end = (ex + out_dir * canvas_margin, ay - (h_hit + slope * canvas_margin))
            segments.append(RaySegment(hit, end, "real"))
        else:
            style = "real" if s_image > 0 else "virtual"
            segments.append(RaySegment(hit, tip_img, style))
        return RayPath(segments=tuple(segments))

    return [ray(hit_parallel, slope_parallel), ray(hit_center, slope_center)]


@dataclass(frozen=True)
class SpriteTransform:
    x: float        # image base position on the page, px
    y: float        # axis height, px
    scale_x: float
    scale_y: float  # signed; negative flips vertically


def image_of(obj: OpticalObject, element: OpticalElement):
    """Solver result plus the sprite placement for the projected image."""
    d_o = element.x - obj.x
    result = (
        solve_mirror(d_o, element.focal_length, obj.height)
        if element.is_mirror
        else solve_thin_lens(d_o, element.focal_length, obj.height)
    )
    if result.nature == "at-infinity":
        return result, None
    out_dir = -1.0 if element.is_mirror else 1.0
    x_img = element.x + out_dir * result.image_distance
    transform = SpriteTransform(
        x=x_img,
        y=element.axis_y,
        scale_x=abs(result.magnification),
        scale_y=result.magnification,
    )
    return result, transform


def element_from_markers(kind: str, x: float, axis_y: float, aperture: float,
                         marker_xs: list[float], converging: bool) -> OpticalElement:
    """Derive an element from segmented focal-point markers: |f| is the mean
    distance from the markers to the element plane, signed by `converging`."""
    if not marker_xs:
        raise ValueError("at least one focal marker required")
    magnitude = sum(abs(mx - x) for mx in marker_xs) / len(marker_xs)
    if magnitude <= 0:
        raise ValueError("focal marker coincides with the element plane")
    f = magnitude if converging else -magnitude
    return OpticalElement(kind=kind, x=x, axis_y=axis_y, focal_length=f, aperture=aperture)
