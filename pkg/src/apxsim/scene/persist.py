"""Versioned project persistence: canonical JSON, lossless round-trip."""

from __future__ import annotations

import base64
import json

import jsonschema

from ..circuit.netlist import Netlist
from ..errors import SchemaViolation, VersionMismatch
from ..vision.raster import RasterImage, SegmentMask
from .model import Binding, Entity, FORMAT_VERSION, Project, Recorder, RoleAssignment, TextToken

_NUM = {"type": "number"}
_STR = {"type": "string"}
_BBOX = {"type": "array", "items": _NUM, "minItems": 4, "maxItems": 4}

PROJECT_SCHEMA = {
    "type": "object",
    "required": ["version", "id", "page", "sim_type", "entities"],
    "properties": {
        "version": {"type": "integer", "minimum": 1},
        "id": _STR,
        "sim_type": {"enum": ["kinematics", "optics", "circuits", "animation"]},
        "page": {
            "type": "object",
            "required": ["width", "height", "png"],
            "properties": {"width": {"type": "integer"}, "height": {"type": "integer"}, "png": _STR},
        },
        "entities": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "mask_png", "source"],
                "properties": {
                    "id": _STR, "mask_png": _STR, "source": _STR, "label": _STR,
                },
            },
        },
        "tokens": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "value", "unit", "bbox", "precision", "display_value"],
                "properties": {
                    "id": _STR, "value": _NUM, "unit": _STR, "bbox": _BBOX,
                    "precision": {"type": "integer"}, "display_value": _NUM,
                },
            },
        },
        "roles": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["entity_id", "role", "params"],
                "properties": {"entity_id": _STR, "role": _STR, "params": {"type": "object"}},
            },
        },
        "bindings": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "token_id", "path", "factor", "min", "max", "step"],
                "properties": {
                    "id": _STR, "token_id": _STR, "path": _STR, "factor": _NUM,
                    "min": _NUM, "max": _NUM, "step": _NUM,
                },
            },
        },
        "recorders": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "path", "sample_period", "window", "samples"],
                "properties": {
                    "id": _STR, "path": _STR, "sample_period": _NUM,
                    "window": {"type": "integer"},
                    "samples": {"type": "array", "items": {"type": "array", "items": _NUM}},
                },
            },
        },
        "tracks": {"type": "array", "items": {"type": "object"}},
        "netlist": {"type": ["object", "null"]},
        "annotations": {"type": ["object", "null"]},
        "world_config": {"type": "object"},
        "counter": {"type": "integer"},
    },
}


def project_to_doc(project: Project) -> dict:
    return {
        "version": project.version,
        "id": project.id,
        "page": {
            "width": project.page.width,
            "height": project.page.height,
            "png": base64.b64encode(project.page.to_png()).decode("ascii"),
        },
        "sim_type": project.sim_type,
        "entities": [
            {
                "id": e.id,
                "mask_png": base64.b64encode(e.mask.to_png()).decode("ascii"),
                "source": e.mask.source,
                "label": e.label,
            }
            for e in sorted(project.entities.values(), key=lambda e: e.id)
        ],
        "tokens": [
            {
                "id": t.id, "value": t.value, "unit": t.unit, "bbox": list(t.bbox),
                "precision": t.precision, "display_value": t.display_value,
            }
            for t in sorted(project.tokens.values(), key=lambda t: t.id)
        ],
        "roles": [
            {"entity_id": r.entity_id, "role": r.role, "params": dict(r.params)}
            for r in sorted(project.roles.values(), key=lambda r: r.entity_id)
        ],
        "bindings": [
            {
                "id": b.id, "token_id": b.token_id, "path": b.path, "factor": b.factor,
                "min": b.min_value, "max": b.max_value, "step": b.step,
            }
            for b in sorted(project.bindings.values(), key=lambda b: b.id)
        ],
        "recorders": [
            {
                "id": r.id, "path": r.path, "sample_period": r.sample_period,
                "window": r.window, "samples": [[t, v] for t, v in r.samples],
            }
            for r in sorted(project.recorders.values(), key=lambda r: r.id)
        ],
        "tracks": list(project.tracks),
        "netlist": project.netlist.to_json() if project.netlist else None,
        "annotations": project.annotations,
        "world_config": dict(project.world_config),
        "counter": project._counter,
    }


def save_project(project: Project) -> bytes:
    doc = project_to_doc(project)
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def project_from_doc(doc: dict) -> Project:
    version = doc.get("version")
    if isinstance(version, int) and version > FORMAT_VERSION:
        raise VersionMismatch(f"document version {version} is newer than {FORMAT_VERSION}")

    validator = jsonschema.Draft202012Validator(PROJECT_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        pointer = "/" + "/".join(str(p) for p in err.absolute_path)
        raise SchemaViolation(err.message, pointer=pointer)

    page = RasterImage.from_png(base64.b64decode(doc["page"]["png"]))
    project = Project(id=doc["id"], page=page, sim_type=doc["sim_type"])
    project.version = doc["version"]
    for e in doc.get("entities", ()):
        mask = SegmentMask.from_png(base64.b64decode(e["mask_png"]), source=e["source"])
        project.entities[e["id"]] = Entity(id=e["id"], mask=mask, label=e.get("label", ""))
    for t in doc.get("tokens", ()):
        project.tokens[t["id"]] = TextToken(
            id=t["id"], value=t["value"], unit=t["unit"], bbox=tuple(t["bbox"]),
            precision=t["precision"], display_value=t["display_value"],
        )
    for r in doc.get("roles", ()):
        project.roles[r["entity_id"]] = RoleAssignment(
            entity_id=r["entity_id"], role=r["role"], params=dict(r["params"])
        )
    for b in doc.get("bindings", ()):
        project.bindings[b["id"]] = Binding(
            id=b["id"], token_id=b["token_id"], path=b["path"], factor=b["factor"],
            min_value=b["min"], max_value=b["max"], step=b["step"],
        )
    for r in doc.get("recorders", ()):
        rec = Recorder(
            id=r["id"], path=r["path"], sample_period=r["sample_period"], window=r["window"]
        )
        rec.samples = [(s[0], s[1]) for s in r["samples"]]
        project.recorders[r["id"]] = rec
    project.tracks = list(doc.get("tracks", ()))
    if doc.get("netlist"):
        project.netlist = Netlist.from_json(doc["netlist"])
    project.annotations = doc.get("annotations")
    project.world_config = dict(doc.get("world_config", {}))
    project._counter = int(doc.get("counter", 0))
    return project


def load_project(data: bytes) -> Project:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaViolation(f"not a JSON document: {exc}", pointer="") from None
    if not isinstance(doc, dict):
        raise SchemaViolation("top level must be an object", pointer="")
    return project_from_doc(doc)
