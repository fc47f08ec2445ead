"""Springs, distance constraints (rigid rods and ropes), and drag handles."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class SpringConstraint:
    id: str
    body_a: str | None          # None = world anchor
    body_b: str | None
    anchor_a: tuple[float, float]  # local frame, or world point for world side
    anchor_b: tuple[float, float]
    stiffness: float            # N/m
    rest_length: float          # m
    damping: float = 0.0        # N*s/m
    compression: float = 0.0    # signed initial displacement, applied at sim start

    def __post_init__(self):
        if self.stiffness <= 0:
            raise ValueError("spring stiffness must be > 0")
        if self.rest_length < 0:
            raise ValueError("rest length must be >= 0")

    def clone(self):
        return SpringConstraint(
            self.id, self.body_a, self.body_b,
            tuple(self.anchor_a), tuple(self.anchor_b),
            self.stiffness, self.rest_length, self.damping, self.compression,
        )


@dataclass
class DistanceConstraint:
    id: str
    body_a: str | None
    body_b: str | None
    anchor_a: tuple[float, float]
    anchor_b: tuple[float, float]
    length: float
    mode: str = "rigid"  # rigid | rope (resists extension only)

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("constraint length must be > 0")
        if self.mode not in ("rigid", "rope"):
            raise ValueError(f"bad distance mode {self.mode!r}")

    def clone(self):
        return DistanceConstraint(
            self.id, self.body_a, self.body_b,
            tuple(self.anchor_a), tuple(self.anchor_b),
            self.length, self.mode,
        )


@dataclass
class DragState:
    body_id: str
    target: tuple[float, float]    # world point the anchor is pulled toward
    local_anchor: tuple[float, float] = (0.0, 0.0)

    def clone(self):
        return DragState(self.body_id, tuple(self.target), tuple(self.local_anchor))
