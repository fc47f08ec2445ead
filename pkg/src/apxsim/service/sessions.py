"""Live simulation sessions: single-writer state, commands at tick boundaries.

A session's observable state is a pure function of (project snapshot, command
log with tick stamps, tick count); wall time only paces the loop. Kinematics
and animation tick continuously at the session rate; optics and circuits are
event-driven and emit one frame per applied command.
"""

from __future__ import annotations

import asyncio
import itertools
import json
import math
import time

from ..errors import (
    ApxError,
    IllegalCommandForKind,
    UnknownBody,
    UnknownSession,
)
from ..circuit.netlist import edit_component_value
from ..circuit.solve import solve_dc
from ..optics import image_of, principal_rays
from ..scene.build import (
    build_animation,
    build_circuit_netlist,
    build_kinematics_world,
    build_optics_scene,
)
from ..scene.model import Project
from ..animation import track_pose

DEFAULT_TICK_RATE = 60

_KINEMATIC_COMMANDS = {"set_parameter", "drag", "end_drag", "nudge_binding"}
_OPTICS_COMMANDS = {"drag", "set_parameter", "nudge_binding"}
_CIRCUIT_COMMANDS = {"edit_component_value", "nudge_binding"}
_ANIMATION_COMMANDS = {"set_parameter", "nudge_binding"}

COMMANDS_FOR_KIND = {
    "kinematics": _KINEMATIC_COMMANDS,
    "optics": _OPTICS_COMMANDS,
    "circuits": _CIRCUIT_COMMANDS,
    "animation": _ANIMATION_COMMANDS,
}


class Session:
    def __init__(self, session_id: str, project: Project, tick_rate: int = DEFAULT_TICK_RATE):
        from ..scene.persist import load_project, save_project

        self.id = session_id
        # sessions own an isolated snapshot of the authoring document
        self._project_bytes = save_project(project)
        self.project = load_project(self._project_bytes)
        self.kind = self.project.sim_type
        self.tick_rate = tick_rate
        self.tick = 0
        self.status = "idle"  # idle | running | paused
        self.command_queue: list[dict] = []
        self.command_log: list[tuple[int, dict]] = []
        self.subscribers: list[asyncio.Queue] = []
        self.last_frame: dict | None = None
        self._task: asyncio.Task | None = None
        self._recorder_due: dict[str, float] = {}
        self._build()

    # construction -----------------------------------------------------------

    def _build(self):
        kind = self.kind
        if kind == "kinematics":
            self.world = build_kinematics_world(self.project)
            self.world.start()
        elif kind == "optics":
            obj, element = build_optics_scene(self.project)
            self.optics_object = obj
            self.optics_element = element
        elif kind == "circuits":
            self.netlist = build_circuit_netlist(self.project)
            self.solution = None
        elif kind == "animation":
            self.paths, self.tracks = build_animation(self.project)
            self.clock = 0.0
        else:
            raise ApxError(f"unknown simulation kind {kind!r}")

    def reset(self):
        from ..scene.persist import load_project

        self.tick = 0
        self.command_queue.clear()
        self.command_log.clear()
        self._recorder_due.clear()
        self.project = load_project(self._project_bytes)  # pristine snapshot
        self._build()
        self.last_frame = None
        self._emit("snapshot", self.snapshot_payload())

    # pub/sub ------------------------------------------------------------------

    def subscribe(self) -> asyncio.Queue:
        q: asyncio.Queue = asyncio.Queue()
        q.put_nowait(self._event("snapshot", self.snapshot_payload()))
        self.subscribers.append(q)
        return q

    def unsubscribe(self, q: asyncio.Queue):
        if q in self.subscribers:
            self.subscribers.remove(q)

    def _event(self, kind: str, payload: dict) -> dict:
        return {
            "type": kind,
            "session": self.id,
            "tick": self.tick,
            "ts": time.time(),
            "payload": payload,
        }

    def _emit(self, kind: str, payload: dict):
        event = self._event(kind, payload)
        if kind == "frame":
            self.last_frame = event
        for q in list(self.subscribers):
            q.put_nowait(event)
        return event

    def close(self, reason: str = "session_deleted"):
        self.status = "idle"
        if self._task is not None:
            self._task.cancel()
            self._task = None
        for q in list(self.subscribers):
            q.put_nowait({"type": "close", "session": self.id, "reason": reason})
        self.subscribers.clear()

    # commands -------------------------------------------------------------------

    def enqueue(self, command: dict) -> int:
        ctype = command.get("type")
        if ctype not in COMMANDS_FOR_KIND[self.kind]:
            raise IllegalCommandForKind(
                f"command {ctype!r} is not valid for a {self.kind} session"
            )
        self.command_queue.append(command)
        ack = self.tick + 1
        if self.kind in ("optics", "circuits"):
            # event-driven kinds apply immediately, one frame per change
            self.advance_ticks(1)
        return ack

    def _apply_command(self, command: dict):
        ctype = command["type"]
        kind = self.kind
        if ctype == "nudge_binding":
            self.project.nudge_binding(command["binding"], float(command["delta_px"]))
            binding = self.project.bindings[command["binding"]]
            get, _put = self.project.resolve_property(binding.path)
            self._apply_property(binding.path, get())
            return
        if kind == "kinematics":
            if ctype == "set_parameter":
                self.world.set_parameter(command["object"], command["key"], command["value"])
                self._sync_role_param(command["object"], command["key"], command["value"])
            elif ctype == "drag":
                scale = self.world.pixel_scale
                self.world.apply_drag(
                    command["body"],
                    (float(command["x_px"]) * scale, float(command["y_px"]) * scale),
                )
            elif ctype == "end_drag":
                self.world.end_drag(command["body"])
        elif kind == "optics":
            if ctype == "drag":
                eid = command["entity"]
                x = float(command["x_px"])
                if eid == self.optics_object.sprite or eid == "object":
                    self.optics_object = type(self.optics_object)(
                        x=x, height=self.optics_object.height, sprite=self.optics_object.sprite
                    )
                else:  # dragging a focal marker adjusts |f|
                    el = self.optics_element
                    magnitude = abs(x - el.x)
                    f = magnitude if el.focal_length >= 0 else -magnitude
                    self.optics_element = type(el)(
                        kind=el.kind, x=el.x, axis_y=el.axis_y,
                        focal_length=f, aperture=el.aperture,
                    )
            elif ctype == "set_parameter":
                el = self.optics_element
                if command["key"] != "focal_length":
                    raise IllegalCommandForKind(f"optics exposes focal_length, not {command['key']!r}")
                self.optics_element = type(el)(
                    kind=el.kind, x=el.x, axis_y=el.axis_y,
                    focal_length=float(command["value"]), aperture=el.aperture,
                )
        elif kind == "circuits":
            if ctype == "edit_component_value":
                self.netlist = edit_component_value(
                    self.netlist, command["component"], float(command["value"])
                )
                self.project.netlist = self.netlist
        elif kind == "animation":
            if ctype == "set_parameter":
                self._set_track_param(command["object"], command["key"], command["value"])

    def _sync_role_param(self, object_id: str, key: str, value):
        assignment = self.project.roles.get(object_id)
        if assignment and key in assignment.params:
            assignment.params[key] = value

    def _apply_property(self, path: str, value):
        """Propagate a binding-backed property change into the live state."""
        head, _, key = path.partition(".")
        if self.kind == "kinematics":
            targets = [head]
            if head not in self.world.bodies and head not in self.world.springs and head not in self.world.distances:
                targets = self.project.entities_with_role(head)
            for target in targets:
                try:
                    self.world.set_parameter(target, key, value)
                    return
                except (UnknownBody, ApxError):
                    continue
        elif self.kind == "circuits":
            comp_ids = {c.id for c in self.netlist.components}
            if head in comp_ids and key == "value":
                self.netlist = edit_component_value(self.netlist, head, float(value))
                self.project.netlist = self.netlist
        elif self.kind == "optics":
            if key == "focal_length":
                el = self.optics_element
                self.optics_element = type(el)(
                    kind=el.kind, x=el.x, axis_y=el.axis_y,
                    focal_length=float(value), aperture=el.aperture,
                )

    def _set_track_param(self, object_id: str, key: str, value):
        for i, track in enumerate(self.tracks):
            if track.object_id != object_id:
                continue
            fields = {
                "object_id": track.object_id,
                "path_id": track.path_id,
                "speed": track.speed,
                "direction": track.direction,
                "loop_mode": track.loop_mode,
                "phase_offset": track.phase_offset,
                "orient_to_path": track.orient_to_path,
            }
            if key not in fields or key in ("object_id", "path_id"):
                raise IllegalCommandForKind(f"cannot set track field {key!r}")
            fields[key] = value
            self.tracks[i] = type(track)(**fields)
            return
        raise UnknownBody(f"no track for object {object_id!r}")

    # stepping ----------------------------------------------------------------------

    def advance_ticks(self, n: int = 1):
        frames = []
        for _ in range(n):
            commands = self.command_queue
            self.command_queue = []
            self.tick += 1
            for command in commands:
                self._apply_command(command)
                self.command_log.append((self.tick, command))
            self._step_simulation()
            frames.append(self._emit("frame", self.frame_payload()))
        return frames

    def _step_simulation(self):
        dt = 1.0 / self.tick_rate
        if self.kind == "kinematics":
            self.world.step(dt)
            self._sample_recorders(self.world.time)
        elif self.kind == "circuits":
            self.solution = solve_dc(self.netlist)
        elif self.kind == "animation":
            self.clock += dt
            self._sample_recorders(self.clock)
        # optics is stateless in time; frame_payload re-solves

    def _pendulum_angle(self, body):
        """Swing angle about a world anchor when the body hangs from one."""
        for dist in self.world.distances.values():
            anchor = None
            if dist.body_b == body.id and dist.body_a is None:
                anchor = dist.anchor_a
            elif dist.body_a == body.id and dist.body_b is None:
                anchor = dist.anchor_b
            if anchor is not None:
                return math.atan2(body.px - anchor[0], body.py - anchor[1])
        return body.angle

    def _recorder_value(self, path: str):
        head, _, key = path.partition(".")
        if self.kind == "kinematics":
            body = self.world.bodies.get(head)
            if body is None:
                matches = self.project.entities_with_role(head)
                body = self.world.bodies.get(matches[0]) if matches else None
            if body is None:
                return None
            if key == "angle":
                return self._pendulum_angle(body)
            return {
                "x": body.px, "y": body.py, "spin": body.angle,
                "vx": body.vx, "vy": body.vy, "omega": body.omega,
            }.get(key)
        if self.kind == "circuits" and self.solution is not None:
            if key == "voltage":
                return self.solution.voltages.get(head)
            if key == "current":
                return self.solution.currents.get(head)
        if self.kind == "animation":
            for track in self.tracks:
                if track.object_id == head:
                    pose = track_pose(track, self.paths[track.path_id], self.clock)
                    return getattr(pose, key, None)
        return None

    def _sample_recorders(self, t: float):
        self._new_samples = {}
        for rid, rec in self.project.recorders.items():
            due = self._recorder_due.get(rid, 0.0)
            if t + 1e-12 < due:
                continue
            value = self._recorder_value(rec.path)
            if value is None:
                continue
            if rec.samples and t <= rec.samples[-1][0]:
                continue
            self.project.record_tick(rid, t, float(value))
            self._recorder_due[rid] = due + rec.sample_period if due else t + rec.sample_period
            self._new_samples.setdefault(rid, []).append([t, float(value)])

    # payloads -------------------------------------------------------------------------

    def snapshot_payload(self) -> dict:
        payload = {"kind": self.kind, "status": self.status, "full": True}
        payload.update(self._state_payload(include_recorder_history=True))
        return payload

    def frame_payload(self) -> dict:
        payload = {"kind": self.kind}
        payload.update(self._state_payload(include_recorder_history=False))
        return payload

    def _state_payload(self, include_recorder_history: bool) -> dict:
        if self.kind == "kinematics":
            state = self.world.snapshot()
            out = {"world": state}
        elif self.kind == "optics":
            result, transform = image_of(self.optics_object, self.optics_element)
            rays = principal_rays(self.optics_object, self.optics_element)
            out = {
                "element": {
                    "kind": self.optics_element.kind,
                    "x": self.optics_element.x,
                    "axis_y": self.optics_element.axis_y,
                    "focal_length": self.optics_element.focal_length,
                    "aperture": self.optics_element.aperture,
                },
                "object": {
                    "x": self.optics_object.x,
                    "height": self.optics_object.height,
                    "sprite": self.optics_object.sprite,
                },
                "image": {
                    "distance": result.image_distance,
                    "height": result.image_height,
                    "magnification": result.magnification,
                    "nature": result.nature,
                },
                "sprite_transform": None if transform is None else {
                    "x": transform.x, "y": transform.y,
                    "scale_x": transform.scale_x, "scale_y": transform.scale_y,
                },
                "rays": [
                    [
                        {"p0": list(seg.p0), "p1": list(seg.p1), "style": seg.style}
                        for seg in path.segments
                    ]
                    for path in rays
                ],
            }
        elif self.kind == "circuits":
            out = {"netlist": self.netlist.to_json()}
            if self.solution is not None:
                out["solution"] = self.solution.to_json()
        else:  # animation
            poses = {}
            for track in self.tracks:
                pose = track_pose(track, self.paths[track.path_id], self.clock)
                poses[track.object_id] = {
                    "x": pose.x, "y": pose.y, "angle": pose.angle, "finished": pose.finished,
                }
            out = {"t": self.clock, "poses": poses}
        if include_recorder_history:
            out["recorders"] = {
                rid: [[t, v] for t, v in rec.samples]
                for rid, rec in self.project.recorders.items()
            }
        else:
            out["recorders"] = getattr(self, "_new_samples", {}) or {}
        return out

    # the 60 Hz pacing loop --------------------------------------------------------------

    async def _loop(self):
        loop = asyncio.get_running_loop()
        period = 1.0 / self.tick_rate
        next_t = loop.time() + period
        try:
            while self.status == "running":
                delay = next_t - loop.time()
                if delay > 0:
                    await asyncio.sleep(delay)
                else:
                    await asyncio.sleep(0)
                if self.status != "running":
                    break
                self.advance_ticks(1)
                next_t += period
                if loop.time() > next_t + 1.0:
                    next_t = loop.time() + period  # resync after a long stall
        except asyncio.CancelledError:
            pass

    def run(self):
        if self.status == "running":
            return
        self.status = "running"
        if self.kind in ("kinematics", "animation"):
            self._task = asyncio.get_running_loop().create_task(self._loop())
        else:
            # event-driven kinds solve once on run
            self.advance_ticks(1)

    def pause(self):
        if self.status == "running":
            self.status = "paused"
            if self._task is not None:
                self._task.cancel()
                self._task = None


class SessionManager:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._ids = itertools.count(1)

    def create(self, project: Project, tick_rate: int = DEFAULT_TICK_RATE) -> Session:
        sid = f"s{next(self._ids)}"
        session = Session(sid, project, tick_rate=tick_rate)
        self._sessions[sid] = session
        return session

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id!r}")
        return session

    def delete(self, session_id: str):
        session = self.get(session_id)
        session.close()
        del self._sessions[session_id]

    def all(self):
        return list(self._sessions.values())
