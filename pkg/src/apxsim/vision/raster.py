"""Raster page images, segmentation prompts, and binary masks.

Pixel coordinates are top-left origin, x right, y down. Images are 8-bit
RGBA row-major; masks are one bit per pixel with the same dimensions as
their source image.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image

from ..errors import DimensionMismatch, EmptyMask


@dataclass(frozen=True)
class RasterImage:
    width: int
    height: int
    pixels: bytes  # row-major RGBA, 8 bits per channel

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be >= 1")
        if len(self.pixels) != self.width * self.height * 4:
            raise ValueError("pixel buffer length must be width*height*4")

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RasterImage":
        arr = np.asarray(arr, dtype=np.uint8)
        if arr.ndim == 2:
            arr = np.stack([arr, arr, arr, np.full_like(arr, 255)], axis=-1)
        if arr.shape[-1] == 3:
            alpha = np.full(arr.shape[:2] + (1,), 255, dtype=np.uint8)
            arr = np.concatenate([arr, alpha], axis=-1)
        h, w = arr.shape[:2]
        return cls(width=w, height=h, pixels=arr.tobytes())

    @classmethod
    def from_png(cls, data: bytes) -> "RasterImage":
        img = Image.open(io.BytesIO(data))
        img = img.convert("RGBA")
        return cls.from_array(np.asarray(img))

    @classmethod
    def open(cls, path) -> "RasterImage":
        with open(path, "rb") as fh:
            return cls.from_png(fh.read())

    def to_array(self) -> np.ndarray:
        arr = np.frombuffer(self.pixels, dtype=np.uint8)
        return arr.reshape(self.height, self.width, 4)

    def rgb(self) -> np.ndarray:
        return self.to_array()[:, :, :3].astype(np.int32)

    def luminance(self) -> np.ndarray:
        """Rec. 601 luma of the RGB channels, float array."""
        rgb = self.to_array()[:, :, :3].astype(np.float64)
        return 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]

    def to_png(self) -> bytes:
        img = Image.fromarray(self.to_array(), mode="RGBA")
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return buf.getvalue()

    def contains(self, x: float, y: float) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height


@dataclass(frozen=True)
class PointPrompt:
    x: int
    y: int
    polarity: str = "positive"  # positive | negative

    def __post_init__(self):
        if self.polarity not in ("positive", "negative"):
            raise ValueError(f"bad polarity {self.polarity!r}")


@dataclass(frozen=True)
class BoxPrompt:
    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError("box must satisfy x0 < x1 and y0 < y1")

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    def as_tuple(self):
        return (self.x0, self.y0, self.x1, self.y1)


class SegmentMask:
    """Binary region over a source image; immutable once constructed."""

    __slots__ = ("width", "height", "source", "_bits")

    def __init__(self, bits: np.ndarray, source: str = "generated"):
        bits = np.ascontiguousarray(np.asarray(bits, dtype=bool))
        if bits.ndim != 2:
            raise ValueError("mask bits must be a 2-D array")
        if not bits.any():
            raise EmptyMask("mask has no set pixels")
        bits.setflags(write=False)
        self._bits = bits
        self.height, self.width = bits.shape
        self.source = source

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def pixel_count(self) -> int:
        return int(self._bits.sum())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SegmentMask)
            and self.width == other.width
            and self.height == other.height
            and self.source == other.source
            and bool(np.array_equal(self._bits, other._bits))
        )

    def __hash__(self):
        return hash((self.width, self.height, self.source, self._bits.tobytes()))

    def pixels(self) -> list[tuple[int, int]]:
        ys, xs = np.nonzero(self._bits)
        return list(zip(xs.tolist(), ys.tolist()))

    def to_png(self) -> bytes:
        """1-bit PNG, 0 = background and 255 = foreground."""
        img = Image.fromarray(self._bits.astype(np.uint8) * 255, mode="L").convert("1")
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return buf.getvalue()

    @classmethod
    def from_png(cls, data: bytes, source: str = "imported") -> "SegmentMask":
        img = Image.open(io.BytesIO(data)).convert("L")
        return cls(np.asarray(img) > 127, source=source)


def import_mask(image: RasterImage, mask_bitmap) -> SegmentMask:
    """Wrap an externally produced 1-bit bitmap as a mask for `image`.

    `mask_bitmap` may be PNG bytes or a 2-D boolean array. Dimensions must
    match the image exactly.
    """
    if isinstance(mask_bitmap, (bytes, bytearray)):
        mask = SegmentMask.from_png(bytes(mask_bitmap), source="imported")
        bits = mask.bits
    else:
        bits = np.asarray(mask_bitmap, dtype=bool)
    if bits.shape != (image.height, image.width):
        raise DimensionMismatch(
            f"mask {bits.shape[1]}x{bits.shape[0]} does not match "
            f"image {image.width}x{image.height}"
        )
    return SegmentMask(bits, source="imported")


def bounding_box(mask: SegmentMask) -> BoxPrompt:
    """Tight axis-aligned box over set pixels, exclusive-max convention."""
    ys, xs = np.nonzero(mask.bits)
    if len(xs) == 0:
        raise EmptyMask("cannot bound an empty mask")
    return BoxPrompt(int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)
