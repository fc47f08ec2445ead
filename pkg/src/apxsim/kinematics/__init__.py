"""2D rigid-body simulation over polygonized segments."""

from .body import Body, build_body, polygon_mass_properties
from .constraints import DistanceConstraint, DragState, SpringConstraint
from .params import PARAM_SCHEMAS, validate_parameter
from .world import World

__all__ = [
    "Body",
    "DistanceConstraint",
    "DragState",
    "PARAM_SCHEMAS",
    "SpringConstraint",
    "World",
    "build_body",
    "polygon_mass_properties",
    "validate_parameter",
]
