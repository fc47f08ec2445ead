"""Role catalogs and per-role parameter schemas for each simulation type."""

from __future__ import annotations

import math

from ..errors import IllegalRoleForSimType, OutOfRange, UnknownParameter

SIM_TYPES = ("kinematics", "optics", "circuits", "animation")

_INF = math.inf

# role -> key -> (type, min, max, default)
ROLE_SCHEMAS: dict[str, dict[str, dict[str, tuple]]] = {
    "kinematics": {
        "dynamic-object": {
            "mass": (float, 1e-9, _INF, 1.0),
            "friction": (float, 0.0, 2.0, 0.5),
            "restitution": (float, 0.0, 1.0, 0.0),
            "lock_rotation": (bool, None, None, False),
        },
        "static-object": {
            "friction": (float, 0.0, 2.0, 0.5),
            "restitution": (float, 0.0, 1.0, 0.0),
        },
        "spring": {
            "stiffness": (float, 1e-9, _INF, 100.0),
            "damping": (float, 0.0, _INF, 1.0),
            "rest_length": (float, 0.0, _INF, 0.0),   # 0 = use drawn length
            "compression": (float, -_INF, _INF, 0.0),
            "body_a": (str, None, None, "world"),
            "body_b": (str, None, None, "world"),
        },
        "string": {
            "length": (float, 0.0, _INF, 0.0),        # 0 = use drawn length
            "mode": (str, None, None, "rigid"),
            "body_a": (str, None, None, "world"),
            "body_b": (str, None, None, "world"),
        },
    },
    "optics": {
        "lens": {
            "variant": (str, None, None, "convex"),        # convex | concave
            "focal_length": (float, -_INF, _INF, 0.0),      # 0 = from markers
        },
        "mirror": {
            "variant": (str, None, None, "concave"),       # concave | convex | plane
            "focal_length": (float, -_INF, _INF, 0.0),
        },
        "focal-point": {},
        "projected-object": {},
    },
    "circuits": {
        "circuit-component": {
            "kind": (str, None, None, "resistor"),
            "value": (float, 1e-30, _INF, 100.0),
        },
    },
    "animation": {
        "path": {
            "smooth": (bool, None, None, False),
            "prune_px": (float, 0.0, 100.0, 5.0),
        },
    },
}

_STR_CHOICES = {
    "mode": ("rigid", "rope"),
    "variant": ("convex", "concave", "plane"),
    "kind": ("resistor", "battery", "capacitor"),
}


def legal_roles(sim_type: str) -> tuple[str, ...]:
    if sim_type not in ROLE_SCHEMAS:
        raise IllegalRoleForSimType(f"unknown simulation type {sim_type!r}")
    return tuple(ROLE_SCHEMAS[sim_type])


def validate_role_params(sim_type: str, role: str, params: dict) -> dict:
    """Validate against the role schema and fill defaults."""
    if sim_type not in ROLE_SCHEMAS or role not in ROLE_SCHEMAS[sim_type]:
        raise IllegalRoleForSimType(f"role {role!r} is not legal for {sim_type!r}")
    schema = ROLE_SCHEMAS[sim_type][role]
    out = {}
    for key, (kind, lo, hi, default) in schema.items():
        out[key] = default
    for key, value in (params or {}).items():
        if key not in schema:
            raise UnknownParameter(f"{key!r} is not a parameter of role {role!r}")
        kind, lo, hi, _default = schema[key]
        if kind is bool:
            out[key] = bool(value)
        elif kind is str:
            value = str(value)
            choices = _STR_CHOICES.get(key)
            if choices and value not in choices:
                raise OutOfRange(f"{key} must be one of {choices}, got {value!r}")
            out[key] = value
        else:
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise OutOfRange(f"{key} must be numeric") from None
            if not (lo <= value <= hi) or (math.isnan(value)):
                raise OutOfRange(f"{key}={value} outside [{lo}, {hi}]")
            out[key] = value
    return out


def validate_param_update(sim_type: str, role: str, key: str, value):
    """Validate a single in-place parameter edit."""
    merged = validate_role_params(sim_type, role, {key: value})
    return merged[key]
