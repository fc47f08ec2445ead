"""Looped path-following animation over arc-length parametrized polylines."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .errors import DegeneratePath, DuplicateObjectTrack, SampleOutOfRange, UnknownId

CLOSE_ENDPOINT_PX = 3.0  # endpoints within this are treated as a closed path


@dataclass(frozen=True)
class MotionPath:
    id: str
    points: tuple[tuple[float, float], ...]
    closed: bool
    cumulative: tuple[float, ...]  # arc length up to each point

    @property
    def length(self) -> float:
        total = self.cumulative[-1]
        if self.closed:
            last = self.points[-1]
            first = self.points[0]
            total += math.hypot(first[0] - last[0], first[1] - last[1])
        return total


@dataclass(frozen=True)
class AnimationTrack:
    object_id: str
    path_id: str
    speed: float            # px/s
    direction: int = 1      # +1 | -1
    loop_mode: str = "loop"  # loop | ping-pong | once
    phase_offset: float = 0.0  # seconds
    orient_to_path: bool = False

    def __post_init__(self):
        if self.speed <= 0:
            raise ValueError("track speed must be > 0")
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        if self.loop_mode not in ("loop", "ping-pong", "once"):
            raise ValueError(f"bad loop mode {self.loop_mode!r}")


@dataclass(frozen=True)
class TrackPose:
    x: float
    y: float
    angle: float
    finished: bool = False


def chaikin_smooth(points, closed: bool, iterations: int = 2):
    """Optional corner-cutting smoothing pass (cosmetic)."""
    pts = [(float(x), float(y)) for x, y in points]
    for _ in range(iterations):
        out = []
        n = len(pts)
        last = n if closed else n - 1
        for i in range(last):
            a = pts[i]
            b = pts[(i + 1) % n]
            out.append((0.75 * a[0] + 0.25 * b[0], 0.75 * a[1] + 0.25 * b[1]))
            out.append((0.25 * a[0] + 0.75 * b[0], 0.25 * a[1] + 0.75 * b[1]))
        if not closed:
            out = [pts[0]] + out + [pts[-1]]
        pts = out
    return pts


def parametrize(polyline, closed: bool | None = None, path_id: str = "path",
                smooth: bool = False) -> MotionPath:
    """Arc-length table over a polyline; closed paths wrap implicitly."""
    points = [(float(x), float(y)) for x, y in getattr(polyline, "points", polyline)]
    if closed is None:
        closed = bool(getattr(polyline, "closed", False))
        if not closed and len(points) >= 3:
            dx = points[0][0] - points[-1][0]
            dy = points[0][1] - points[-1][1]
            closed = math.hypot(dx, dy) <= CLOSE_ENDPOINT_PX
    deduped = []
    for p in points:
        if not deduped or p != deduped[-1]:
            deduped.append(p)
    if closed and len(deduped) > 1 and deduped[0] == deduped[-1]:
        deduped.pop()
    if len(deduped) < 2:
        raise DegeneratePath("need at least 2 distinct points")
    if smooth:
        deduped = chaikin_smooth(deduped, closed)

    cumulative = [0.0]
    for a, b in zip(deduped, deduped[1:]):
        cumulative.append(cumulative[-1] + math.hypot(b[0] - a[0], b[1] - a[1]))
    path = MotionPath(
        id=path_id, points=tuple(deduped), closed=closed, cumulative=tuple(cumulative)
    )
    if path.length < 1.0:
        raise DegeneratePath(f"path length {path.length:.3f} px below 1 px")
    return path


def sample(path: MotionPath, s: float):
    """Point and unit tangent at arc length s; closed paths wrap s mod L."""
    total = path.length
    if path.closed:
        s = math.fmod(s, total)
        if s < 0:
            s += total
    elif s < 0 or s > total:
        raise SampleOutOfRange(f"s={s} outside [0, {total}]")

    pts = path.points
    cum = path.cumulative
    if s <= cum[-1]:
        i = bisect.bisect_right(cum, s) - 1
        i = max(0, min(i, len(pts) - 2))
        a = pts[i]
        b = pts[i + 1]
        seg_s = s - cum[i]
        seg_len = cum[i + 1] - cum[i]
    else:  # implicit wrap segment of a closed path
        a = pts[-1]
        b = pts[0]
        seg_s = s - cum[-1]
        seg_len = total - cum[-1]
    if seg_len == 0:
        return a, (1.0, 0.0)
    t = seg_s / seg_len
    point = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
    tangent = ((b[0] - a[0]) / seg_len, (b[1] - a[1]) / seg_len)
    return point, tangent


def track_pose(track: AnimationTrack, path: MotionPath, t: float) -> TrackPose:
    """Sprite transform at time t under the track's loop mode."""
    total = path.length
    travelled = track.direction * track.speed * (t + track.phase_offset)
    finished = False
    if track.loop_mode == "loop":
        s = math.fmod(travelled, total)
        if s < 0:
            s += total
    elif track.loop_mode == "ping-pong":
        cycle = math.fmod(travelled, 2.0 * total)
        if cycle < 0:
            cycle += 2.0 * total
        s = cycle if cycle <= total else 2.0 * total - cycle
    else:  # once
        s = min(max(travelled, 0.0), total)
        finished = travelled >= total
    point, tangent = sample(path, s)
    angle = math.atan2(tangent[1], tangent[0]) if track.orient_to_path else 0.0
    return TrackPose(x=point[0], y=point[1], angle=angle, finished=finished)


def assign_tracks(assignments, object_ids, path_ids) -> list[AnimationTrack]:
    """Create one track per object; objects without tracks stay static."""
    tracks = []
    seen = set()
    for entry in assignments:
        object_id = entry["object_id"]
        path_id = entry["path_id"]
        if object_id not in object_ids:
            raise UnknownId(f"no object {object_id!r}")
        if path_id not in path_ids:
            raise UnknownId(f"no path {path_id!r}")
        if object_id in seen:
            raise DuplicateObjectTrack(f"object {object_id!r} already has a track")
        seen.add(object_id)
        tracks.append(AnimationTrack(
            object_id=object_id,
            path_id=path_id,
            speed=float(entry.get("speed", 60.0)),
            direction=int(entry.get("direction", 1)),
            loop_mode=entry.get("loop_mode", "loop"),
            phase_offset=float(entry.get("phase_offset", 0.0)),
            orient_to_path=bool(entry.get("orient_to_path", False)),
        ))
    return tracks
