"""The authoring document: page, entities, roles, bindings, recorders."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..circuit.netlist import Netlist, edit_component_value
from ..errors import (
    NonMonotonicTime,
    UnknownBinding,
    UnknownEntity,
    UnknownToken,
    UnresolvedProperty,
)
from ..vision.raster import RasterImage, SegmentMask, bounding_box
from .roles import validate_role_params

FORMAT_VERSION = 1


@dataclass
class Entity:
    id: str
    mask: SegmentMask
    label: str = ""

    @property
    def bbox(self):
        return bounding_box(self.mask).as_tuple()

    def __eq__(self, other):
        return (
            isinstance(other, Entity)
            and self.id == other.id
            and self.label == other.label
            and self.mask == other.mask
        )


def _precision_of(value) -> int:
    text = str(value)
    if "." in text and "e" not in text and "E" not in text:
        return len(text.split(".")[1])
    return 0


@dataclass
class TextToken:
    id: str
    value: float
    unit: str
    bbox: tuple[float, float, float, float]
    precision: int = 0
    display_value: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.display_value is None:
            self.display_value = self.value

    @property
    def display_text(self) -> str:
        text = f"{self.display_value:.{self.precision}f}"
        return f"{text} {self.unit}".strip()


@dataclass
class RoleAssignment:
    entity_id: str
    role: str
    params: dict = field(default_factory=dict)


@dataclass
class Binding:
    id: str
    token_id: str
    path: str
    factor: float = 1.0
    min_value: float = 0.0
    max_value: float = 1.0
    step: float = 0.01  # value units per pixel of drag

    def __post_init__(self):
        if not (math.isfinite(self.min_value) and math.isfinite(self.max_value)):
            raise ValueError("binding range must be finite")
        if self.min_value >= self.max_value:
            raise ValueError("binding requires min < max")


@dataclass
class Recorder:
    id: str
    path: str
    sample_period: float = 1.0 / 60.0
    window: int = 600
    samples: list = field(default_factory=list)  # (t, value), chronological


@dataclass
class Project:
    id: str
    page: RasterImage
    sim_type: str = "kinematics"
    entities: dict[str, Entity] = field(default_factory=dict)
    tokens: dict[str, TextToken] = field(default_factory=dict)
    roles: dict[str, RoleAssignment] = field(default_factory=dict)
    bindings: dict[str, Binding] = field(default_factory=dict)
    recorders: dict[str, Recorder] = field(default_factory=dict)
    tracks: list[dict] = field(default_factory=list)
    netlist: Netlist | None = None
    annotations: dict | None = None
    external_recommendation: str | None = None
    world_config: dict = field(default_factory=dict)
    version: int = FORMAT_VERSION
    _counter: int = 0

    # ingest ---------------------------------------------------------------

    def ingest_annotations(self, doc: dict | None):
        """Attach an annotation sidecar: text tokens + symbol detections."""
        self.annotations = doc
        if not doc:
            return self
        for tok in doc.get("tokens", ()):
            tid = str(tok.get("id") or self.fresh_id("t"))
            self.tokens[tid] = TextToken(
                id=tid,
                value=float(tok["value"]),
                unit=str(tok.get("unit", "")),
                bbox=tuple(float(v) for v in tok.get("bbox", (0, 0, 1, 1))),
                precision=_precision_of(tok["value"]),
            )
        return self

    def fresh_id(self, prefix: str) -> str:
        self._counter += 1
        return f"{prefix}{self._counter}"

    def add_entity(self, mask: SegmentMask, label: str = "", entity_id: str | None = None) -> Entity:
        eid = entity_id or self.fresh_id("e")
        entity = Entity(id=eid, mask=mask, label=label)
        self.entities[eid] = entity
        return entity

    # roles ------------------------------------------------------------------

    def assign_role(self, entity_id: str, role: str, params: dict | None = None) -> "Project":
        if entity_id not in self.entities:
            raise UnknownEntity(f"no entity {entity_id!r}")
        validated = validate_role_params(self.sim_type, role, params or {})
        self.roles[entity_id] = RoleAssignment(entity_id=entity_id, role=role, params=validated)
        return self

    def entities_with_role(self, role: str) -> list[str]:
        return sorted(eid for eid, r in self.roles.items() if r.role == role)

    # property paths ---------------------------------------------------------

    def resolve_property(self, path: str):
        """Returns (getter, setter) for a `target.key` property path.

        Targets: an entity id carrying a role, a netlist component id, or a
        unique role name (e.g. "spring.compression").
        """
        head, dot, key = path.partition(".")
        if not dot or not key:
            raise UnresolvedProperty(f"bad property path {path!r}")

        if head in self.roles:
            assignment = self.roles[head]
            if key not in assignment.params:
                raise UnresolvedProperty(f"{key!r} is not a parameter of {head!r}")

            def get():
                return assignment.params[key]

            def put(value):
                from .roles import validate_param_update
                assignment.params[key] = validate_param_update(
                    self.sim_type, assignment.role, key, value
                )

            return get, put

        if self.netlist is not None:
            comp_ids = {c.id for c in self.netlist.components}
            if head in comp_ids:
                if key != "value":
                    raise UnresolvedProperty(f"components expose only .value, got {key!r}")

                def get():
                    return self.netlist.component(head).value

                def put(value):
                    self.netlist = edit_component_value(self.netlist, head, value)

                return get, put

        matching = self.entities_with_role(head)
        if len(matching) == 1:
            return self.resolve_property(f"{matching[0]}.{key}")
        raise UnresolvedProperty(f"cannot resolve {path!r}")

    # bindings -----------------------------------------------------------------

    def create_binding(self, token_id: str, path: str, min_value: float, max_value: float,
                       factor: float = 1.0, step: float | None = None,
                       binding_id: str | None = None) -> Binding:
        if token_id not in self.tokens:
            raise UnknownToken(f"no token {token_id!r}")
        _get, put = self.resolve_property(path)  # raises UnresolvedProperty
        # one binding per token; rebinding a token replaces its old binding
        for bid_old in [b.id for b in self.bindings.values() if b.token_id == token_id]:
            del self.bindings[bid_old]
        bid = binding_id or self.fresh_id("b")
        binding = Binding(
            id=bid, token_id=token_id, path=path, factor=float(factor),
            min_value=float(min_value), max_value=float(max_value),
            step=float(step) if step is not None else (float(max_value) - float(min_value)) / 100.0,
        )
        self.bindings[bid] = binding
        token = self.tokens[token_id]
        token.display_value = min(max(token.value, binding.min_value), binding.max_value)
        put(token.display_value * binding.factor)
        return binding

    def nudge_binding(self, binding_id: str, delta_px: float) -> "Project":
        binding = self.bindings.get(binding_id)
        if binding is None:
            raise UnknownBinding(f"no binding {binding_id!r}")
        token = self.tokens[binding.token_id]
        display = token.display_value + delta_px * binding.step
        display = min(max(display, binding.min_value), binding.max_value)
        token.display_value = display
        _get, put = self.resolve_property(binding.path)
        put(display * binding.factor)
        return self

    def reflect_property(self, path: str, new_value: float) -> "Project":
        """Push a property change back onto every bound token (idempotent)."""
        touched = [b for b in self.bindings.values() if b.path == path]
        for binding in touched:
            token = self.tokens[binding.token_id]
            display = new_value / binding.factor
            token.display_value = display
            _get, put = self.resolve_property(path)
            put(display * binding.factor)
        return self

    def binding_coherent(self, binding_id: str) -> bool:
        binding = self.bindings[binding_id]
        token = self.tokens[binding.token_id]
        get, _put = self.resolve_property(binding.path)
        return token.display_value * binding.factor == get()

    # recorders -------------------------------------------------------------------

    def create_recorder(self, path: str, sample_period: float = 1.0 / 60.0,
                        window: int = 600, recorder_id: str | None = None) -> Recorder:
        rid = recorder_id or self.fresh_id("r")
        rec = Recorder(id=rid, path=path, sample_period=float(sample_period), window=int(window))
        self.recorders[rid] = rec
        return rec

    def record_tick(self, recorder_id: str, t: float, value: float) -> "Project":
        rec = self.recorders.get(recorder_id)
        if rec is None:
            raise UnknownBinding(f"no recorder {recorder_id!r}")
        if rec.samples and t <= rec.samples[-1][0]:
            raise NonMonotonicTime(f"t={t} not after {rec.samples[-1][0]}")
        rec.samples.append((float(t), float(value)))
        if len(rec.samples) > rec.window:
            del rec.samples[: len(rec.samples) - rec.window]
        return self

    def read_series(self, recorder_id: str) -> list[tuple[float, float]]:
        rec = self.recorders.get(recorder_id)
        if rec is None:
            raise UnknownBinding(f"no recorder {recorder_id!r}")
        return list(rec.samples)

    # equality ---------------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Project):
            return False
        return (
            self.id == other.id
            and self.page.pixels == other.page.pixels
            and self.page.width == other.page.width
            and self.page.height == other.page.height
            and self.sim_type == other.sim_type
            and self.entities == other.entities
            and self.tokens == other.tokens
            and self.roles == other.roles
            and self.bindings == other.bindings
            and self.recorders == other.recorders
            and self.tracks == other.tracks
            and self.netlist == other.netlist
            and self.annotations == other.annotations
            and self.world_config == other.world_config
            and self.version == other.version
        )
