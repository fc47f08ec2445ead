"""Parameter schemas per simulated role, shared with the scene layer."""

from __future__ import annotations

import math

from ..errors import OutOfRange, UnknownParameter

_INF = math.inf

# role -> key -> (type, min, max) ; bool params hold (bool, None, None)
PARAM_SCHEMAS: dict[str, dict[str, tuple]] = {
    "dynamic": {
        "mass": (float, 1e-9, _INF),
        "friction": (float, 0.0, 2.0),
        "restitution": (float, 0.0, 1.0),
        "lock_rotation": (bool, None, None),
    },
    "static": {
        "friction": (float, 0.0, 2.0),
        "restitution": (float, 0.0, 1.0),
    },
    "spring": {
        "stiffness": (float, 1e-9, _INF),
        "damping": (float, 0.0, _INF),
        "rest_length": (float, 0.0, _INF),
        "compression": (float, -_INF, _INF),
    },
    "string": {
        "length": (float, 1e-9, _INF),
        "mode": (str, None, None),
    },
}


def validate_parameter(role: str, key: str, value):
    schema = PARAM_SCHEMAS.get(role)
    if schema is None or key not in schema:
        raise UnknownParameter(f"{key!r} is not a parameter of role {role!r}")
    kind, lo, hi = schema[key]
    if kind is bool:
        return bool(value)
    if kind is str:
        if key == "mode" and value not in ("rigid", "rope"):
            raise OutOfRange(f"mode must be rigid or rope, got {value!r}")
        return str(value)
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise OutOfRange(f"{key} must be numeric") from None
    if not math.isfinite(value) or value < lo or value > hi:
        raise OutOfRange(f"{key}={value} outside [{lo}, {hi}]")
    return value
