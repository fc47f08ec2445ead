"""HTTP + WebSocket server for the authoring workflow and live sessions."""

from __future__ import annotations

import asyncio
import base64
import json
import os
from pathlib import Path

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response

from ..circuit.netlist import Component, Netlist, edit_component_value
from ..errors import (
    ApxError,
    IllegalCommandForKind,
    IllegalStateTransition,
    SchemaViolation,
    UnknownBinding,
    UnknownBody,
    UnknownComponent,
    UnknownEntity,
    UnknownNode,
    UnknownSession,
    UnknownToken,
    UnresolvedNetlist,
)
from ..scene.build import build_circuit_netlist
from ..scene.model import Project
from ..scene.persist import load_project, save_project
from ..scene.recommend import recommend_sim_type
from ..scene.roles import SIM_TYPES
from ..vision.contours import mask_to_contours
from ..vision.raster import BoxPrompt, PointPrompt, RasterImage
from ..vision.segmentation import segment_region
from .sessions import SessionManager
from .storage import ProjectStore

DEFAULT_PORT = 8763

_NOT_FOUND = (UnknownSession, UnknownEntity, UnknownToken, UnknownBinding,
              UnknownBody, UnknownComponent, UnknownNode)
_CONFLICT = (IllegalStateTransition, UnresolvedNetlist, IllegalCommandForKind)


def _status_for(exc: ApxError) -> int:
    if isinstance(exc, _NOT_FOUND):
        return 404
    if isinstance(exc, _CONFLICT):
        return 409
    return 400


def create_app(data_dir: str | os.PathLike | None = None) -> FastAPI:
    from fastapi.middleware.cors import CORSMiddleware

    app = FastAPI(title="apxsim service", version="0.1.0")
    # local tool: the browser client may be served from any origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = ProjectStore(data_dir or os.environ.get("APX_DATA_DIR", "./apx-data"))
    manager = SessionManager()
    app.state.store = store
    app.state.sessions = manager

    @app.exception_handler(ApxError)
    async def apx_error_handler(request: Request, exc: ApxError):
        return JSONResponse(status_code=_status_for(exc), content=exc.to_json())

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        errors = []
        for err in exc.errors():
            pointer = "/" + "/".join(str(p) for p in err.get("loc", ()) if p != "body")
            errors.append({"pointer": pointer, "message": err.get("msg", "invalid")})
        return JSONResponse(
            status_code=400,
            content={"error": "schema_violation", "message": "invalid request body",
                     "details": {"errors": errors}},
        )

    def get_project(project_id: str) -> Project:
        return store.get(project_id)

    # projects ------------------------------------------------------------

    @app.post("/projects", status_code=201)
    async def create_project(body: dict):
        png_b64 = body.get("png")
        if not isinstance(png_b64, str):
            raise SchemaViolation("png (base64 string) is required", pointer="/png")
        try:
            page = RasterImage.from_png(base64.b64decode(png_b64))
        except Exception:
            raise SchemaViolation("png is not a decodable PNG", pointer="/png") from None
        project = store.create(page, project_id=body.get("id"))
        project.ingest_annotations(body.get("annotations"))
        if body.get("sim_type"):
            if body["sim_type"] not in SIM_TYPES:
                raise SchemaViolation(f"bad sim_type {body['sim_type']!r}", pointer="/sim_type")
            project.sim_type = body["sim_type"]
        store.save(project)
        return {"project_id": project.id, "width": page.width, "height": page.height,
                "sim_type": project.sim_type}

    @app.get("/projects/{project_id}")
    async def project_summary(project_id: str):
        project = get_project(project_id)
        return {
            "project_id": project.id,
            "sim_type": project.sim_type,
            "page": {"width": project.page.width, "height": project.page.height},
            "entities": [
                {"id": e.id, "bbox": list(e.bbox), "label": e.label,
                 "pixel_count": e.mask.pixel_count}
                for e in sorted(project.entities.values(), key=lambda e: e.id)
            ],
            "tokens": [
                {"id": t.id, "value": t.value, "unit": t.unit, "bbox": list(t.bbox),
                 "display": t.display_text}
                for t in sorted(project.tokens.values(), key=lambda t: t.id)
            ],
            "roles": [
                {"entity_id": r.entity_id, "role": r.role, "params": r.params}
                for r in sorted(project.roles.values(), key=lambda r: r.entity_id)
            ],
            "bindings": [
                {"id": b.id, "token_id": b.token_id, "path": b.path,
                 "min": b.min_value, "max": b.max_value, "step": b.step}
                for b in sorted(project.bindings.values(), key=lambda b: b.id)
            ],
            "recorders": sorted(project.recorders),
            "netlist": project.netlist.to_json() if project.netlist else None,
        }

    @app.get("/projects/{project_id}/page.png")
    async def project_page(project_id: str):
        project = get_project(project_id)
        return Response(content=project.page.to_png(), media_type="image/png")

    @app.get("/projects/{project_id}/export")
    async def export_project(project_id: str):
        project = get_project(project_id)
        return Response(
            content=save_project(project),
            media_type="application/json",
            headers={"Content-Disposition": f'attachment; filename="{project_id}.apx.json"'},
        )

    @app.post("/projects/import", status_code=201)
    async def import_project(request: Request):
        data = await request.body()
        project = load_project(data)
        store.adopt(project)
        return {"project_id": project.id}

    @app.post("/projects/{project_id}/segment", status_code=201)
    async def segment(project_id: str, body: dict):
        project = get_project(project_id)
        prompts = []
        for p in body.get("prompts", ()):
            prompts.append(PointPrompt(int(p["x"]), int(p["y"]), p.get("polarity", "positive")))
        box = None
        if body.get("box"):
            bx = body["box"]
            box = BoxPrompt(int(bx[0]), int(bx[1]), int(bx[2]), int(bx[3]))
        mask = await asyncio.to_thread(
            segment_region, project.page, prompts, box,
            float(body.get("tolerance", 32.0)),
        )
        entity = project.add_entity(mask, label=body.get("label", ""))
        store.save(project)
        contour = mask_to_contours(mask)[0]
        return {
            "entity_id": entity.id,
            "bbox": list(entity.bbox),
            "pixel_count": mask.pixel_count,
            "contour": [[x, y] for x, y in contour.points],
        }

    @app.delete("/projects/{project_id}/entities/{entity_id}")
    async def delete_entity(project_id: str, entity_id: str):
        project = get_project(project_id)
        if entity_id not in project.entities:
            raise UnknownEntity(f"no entity {entity_id!r}")
        project.entities.pop(entity_id)
        project.roles.pop(entity_id, None)
        store.save(project)
        return {"deleted": entity_id}

    @app.post("/projects/{project_id}/sim_type")
    async def set_sim_type(project_id: str, body: dict):
        project = get_project(project_id)
        sim_type = body.get("sim_type")
        if sim_type not in SIM_TYPES:
            raise SchemaViolation(f"bad sim_type {sim_type!r}", pointer="/sim_type")
        if sim_type != project.sim_type:
            project.sim_type = sim_type
            project.roles.clear()  # roles are per-sim-type
        store.save(project)
        return {"sim_type": project.sim_type}

    @app.post("/projects/{project_id}/recommend")
    async def recommend(project_id: str, body: dict | None = None):
        project = get_project(project_id)
        sim_type, rationale = recommend_sim_type(project, (body or {}).get("external"))
        return {"sim_type": sim_type, "rationale": rationale}

    @app.post("/projects/{project_id}/roles")
    async def assign_role(project_id: str, body: dict):
        project = get_project(project_id)
        project.assign_role(body["entity_id"], body["role"], body.get("params"))
        store.save(project)
        assignment = project.roles[body["entity_id"]]
        return {"entity_id": assignment.entity_id, "role": assignment.role,
                "params": assignment.params}

    @app.post("/projects/{project_id}/bindings", status_code=201)
    async def create_binding(project_id: str, body: dict):
        project = get_project(project_id)
        binding = project.create_binding(
            body["token_id"], body["path"],
            min_value=float(body["min"]), max_value=float(body["max"]),
            factor=float(body.get("factor", 1.0)),
            step=body.get("step"),
        )
        store.save(project)
        return {"binding_id": binding.id, "path": binding.path,
                "display": project.tokens[binding.token_id].display_text}

    @app.post("/projects/{project_id}/tracks")
    async def set_tracks(project_id: str, body: dict):
        project = get_project(project_id)
        from ..scene.build import build_animation

        project.tracks = list(body.get("assignments", ()))
        build_animation(project)  # validates ids and duplicates
        store.save(project)
        return {"tracks": project.tracks}

    @app.post("/projects/{project_id}/recorders", status_code=201)
    async def create_recorder(project_id: str, body: dict):
        project = get_project(project_id)
        rec = project.create_recorder(
            body["path"],
            sample_period=float(body.get("sample_period", 1.0 / 60.0)),
            window=int(body.get("window", 600)),
        )
        store.save(project)
        return {"recorder_id": rec.id, "path": rec.path, "window": rec.window}

    @app.post("/projects/{project_id}/netlist/extract")
    async def netlist_extract(project_id: str, body: dict | None = None):
        project = get_project(project_id)
        project.netlist = None
        netlist = await asyncio.to_thread(build_circuit_netlist, project)
        store.save(project)
        return netlist.to_json()

    @app.post("/projects/{project_id}/netlist/edit")
    async def netlist_edit(project_id: str, body: dict):
        project = get_project(project_id)
        action = body.get("action")
        if project.netlist is None and action != "replace":
            raise IllegalStateTransition("no netlist extracted yet")
        if action == "set_value":
            project.netlist = edit_component_value(
                project.netlist, body["component"], float(body["value"])
            )
        elif action == "disconnect":
            net = project.netlist
            comps = tuple(c for c in net.components if c.id != body["component"])
            if len(comps) == len(net.components):
                raise UnknownComponent(f"no component {body['component']!r}")
            project.netlist = Netlist(nodes=net.nodes, components=comps, ref=net.ref,
                                      warnings=net.warnings)
        elif action == "connect":
            net = project.netlist
            nodes = set(net.nodes) | {body["a"], body["b"]}
            comps = tuple(c for c in net.components if c.id != body["component"])
            comps += (Component(
                id=body["component"], kind=body.get("kind", "resistor"),
                value=float(body.get("value", 100.0)),
                node_a=body["a"], node_b=body["b"], plus=body.get("plus"),
            ),)
            warnings = tuple(
                w for w in net.warnings if w.get("component") != body["component"]
            )
            project.netlist = Netlist(nodes=tuple(sorted(nodes)), components=comps,
                                      ref=net.ref, warnings=warnings)
        elif action == "replace":
            project.netlist = Netlist.from_json(body["netlist"])
        else:
            raise SchemaViolation(f"unknown action {action!r}", pointer="/action")
        store.save(project)
        return project.netlist.to_json()

    # sessions ----------------------------------------------------------------

    @app.post("/projects/{project_id}/sessions", status_code=201)
    async def create_session(project_id: str, body: dict | None = None):
        project = get_project(project_id)
        session = manager.create(project, tick_rate=int((body or {}).get("tick_rate", 60)))
        return {"session_id": session.id, "kind": session.kind, "status": session.status}

    @app.get("/sessions/{session_id}")
    async def session_state(session_id: str):
        session = manager.get(session_id)
        return {"session_id": session.id, "kind": session.kind,
                "status": session.status, "tick": session.tick}

    @app.post("/sessions/{session_id}/run")
    async def run_session(session_id: str):
        session = manager.get(session_id)
        if session.kind == "circuits" and session.netlist.warnings:
            raise UnresolvedNetlist(
                "netlist has unresolved warnings",
                warnings=[dict(w) for w in session.netlist.warnings],
            )
        session.run()
        return {"status": session.status, "tick": session.tick}

    @app.post("/sessions/{session_id}/pause")
    async def pause_session(session_id: str):
        session = manager.get(session_id)
        session.pause()
        return {"status": session.status, "tick": session.tick}

    @app.post("/sessions/{session_id}/reset")
    async def reset_session(session_id: str):
        session = manager.get(session_id)
        session.pause()
        session.reset()
        return {"status": session.status, "tick": session.tick}

    @app.post("/sessions/{session_id}/advance")
    async def advance_session(session_id: str, body: dict):
        session = manager.get(session_id)
        if session.status == "running":
            raise IllegalStateTransition("cannot single-step a running session")
        ticks = int(body.get("ticks", 1))
        if ticks < 1 or ticks > 100000:
            raise SchemaViolation("ticks must be in [1, 100000]", pointer="/ticks")
        session.advance_ticks(ticks)
        return {"tick": session.tick}

    @app.post("/sessions/{session_id}/commands")
    async def post_command(session_id: str, body: dict):
        session = manager.get(session_id)
        ack = session.enqueue(body)
        return {"applied_tick": ack}

    @app.get("/sessions/{session_id}/frame")
    async def latest_frame(session_id: str):
        session = manager.get(session_id)
        if session.last_frame is not None:
            return session.last_frame
        return session._event("snapshot", session.snapshot_payload())

    @app.get("/sessions/{session_id}/log")
    async def command_log(session_id: str):
        session = manager.get(session_id)
        return {"log": [{"tick": t, "command": c} for t, c in session.command_log]}

    @app.delete("/sessions/{session_id}")
    async def delete_session(session_id: str):
        manager.delete(session_id)
        return {"deleted": session_id}

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str):
        await websocket.accept()
        try:
            session = manager.get(session_id)
        except UnknownSession:
            await websocket.close(code=4404, reason="unknown_session")
            return
        queue = session.subscribe()
        try:
            while True:
                event = await queue.get()
                if event.get("type") == "close":
                    await websocket.close(code=4000, reason=event.get("reason", "closed"))
                    break
                await websocket.send_text(json.dumps(event, sort_keys=True))
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            session.unsubscribe(queue)

    return app


def __getattr__(name: str):
    # `uvicorn apxsim.service.app:app` works, but merely importing this module
    # must not touch the data directory
    if name == "app":
        return create_app()
    raise AttributeError(name)
