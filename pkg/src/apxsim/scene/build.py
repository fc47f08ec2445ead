"""Builders: turn a project's roles and entities into live simulations."""

from __future__ import annotations

import math

from ..animation import assign_tracks, parametrize
from ..circuit.netlist import Netlist, extract_netlist
from ..circuit.symbols import detect_symbols
from ..errors import UnknownEntity
from ..kinematics.body import build_body
from ..kinematics.constraints import DistanceConstraint, SpringConstraint
from ..kinematics.world import World
from ..optics import OpticalElement, OpticalObject, PLANE_MIRROR_F
from ..vision.contours import mask_to_contours, signed_area, simplify_contour
from ..vision.lines import detect_junctions, detect_lines
from ..vision.skeleton import skeleton_to_polyline, skeletonize
from .model import Project

STATIC_SURFACE_EPSILON = 2.0  # px, curvature approximation knob


def _entity_polygon(entity, epsilon=STATIC_SURFACE_EPSILON):
    contours = mask_to_contours(entity.mask)
    outer = max(
        (c for c in contours if signed_area(c.points) > 0),
        key=lambda c: signed_area(c.points),
    )
    return simplify_contour(outer, epsilon)


def _bbox_major_axis_endpoints(bbox):
    x0, y0, x1, y1 = bbox
    if (x1 - x0) >= (y1 - y0):
        cy = (y0 + y1) / 2.0
        return (x0, cy), (x1, cy)
    cx = (x0 + x1) / 2.0
    return (cx, y0), (cx, y1)


def build_kinematics_world(project: Project) -> World:
    cfg = project.world_config
    world = World(
        gravity=(cfg.get("gravity_x", 0.0), cfg.get("gravity_y", 9.81)),
        pixel_scale=cfg.get("pixel_scale", 0.01),
        timestep=cfg.get("timestep", 1.0 / 120.0),
    )
    scale = world.pixel_scale

    for eid in sorted(project.roles):
        assignment = project.roles[eid]
        if assignment.role not in ("dynamic-object", "static-object"):
            continue
        entity = project.entities[eid]
        role = "dynamic" if assignment.role == "dynamic-object" else "static"
        params = dict(assignment.params)
        params["sprite"] = eid
        body = build_body(
            _entity_polygon(entity), entity.mask, role, params,
            pixel_scale=scale, body_id=eid,
        )
        world.add_body(body)

    def resolve_anchor_sides(entity, params):
        """Pixel-space anchor endpoints paired to the constraint's two sides."""
        end_a, end_b = _bbox_major_axis_endpoints(entity.bbox)
        a_id = params.get("body_a", "world")
        b_id = params.get("body_b", "world")

        def centroid_px(body_id):
            body = world.bodies.get(body_id)
            if body is None:
                raise UnknownEntity(f"constraint references unknown body {body_id!r}")
            return (body.px / scale, body.py / scale)

        if a_id != "world" and b_id != "world":
            ca = centroid_px(a_id)
            da0 = (end_a[0] - ca[0]) ** 2 + (end_a[1] - ca[1]) ** 2
            da1 = (end_b[0] - ca[0]) ** 2 + (end_b[1] - ca[1]) ** 2
            if da1 < da0:
                end_a, end_b = end_b, end_a
        elif b_id != "world":
            cb = centroid_px(b_id)
            db0 = (end_a[0] - cb[0]) ** 2 + (end_a[1] - cb[1]) ** 2
            db1 = (end_b[0] - cb[0]) ** 2 + (end_b[1] - cb[1]) ** 2
            if db0 < db1:
                end_a, end_b = end_b, end_a
        elif a_id != "world":
            ca = centroid_px(a_id)
            da0 = (end_a[0] - ca[0]) ** 2 + (end_a[1] - ca[1]) ** 2
            da1 = (end_b[0] - ca[0]) ** 2 + (end_b[1] - ca[1]) ** 2
            if da1 < da0:
                end_a, end_b = end_b, end_a
        return (a_id, end_a), (b_id, end_b)

    def to_side(world_obj, side):
        body_id, end_px = side
        point_m = (end_px[0] * scale, end_px[1] * scale)
        if body_id == "world":
            return None, point_m
        body = world_obj.bodies[body_id]
        return body_id, (point_m[0] - body.px, point_m[1] - body.py)

    for eid in sorted(project.roles):
        assignment = project.roles[eid]
        entity = project.entities[eid]
        params = assignment.params
        if assignment.role == "spring":
            side_a, side_b = resolve_anchor_sides(entity, params)
            body_a, anchor_a = to_side(world, side_a)
            body_b, anchor_b = to_side(world, side_b)
            rest = params.get("rest_length", 0.0)
            if rest == 0.0:
                pa = anchor_a if body_a is None else (
                    world.bodies[body_a].px + anchor_a[0], world.bodies[body_a].py + anchor_a[1]
                )
                pb = anchor_b if body_b is None else (
                    world.bodies[body_b].px + anchor_b[0], world.bodies[body_b].py + anchor_b[1]
                )
                rest = math.hypot(pb[0] - pa[0], pb[1] - pa[1])
            world.add_spring(SpringConstraint(
                id=eid, body_a=body_a, body_b=body_b,
                anchor_a=anchor_a, anchor_b=anchor_b,
                stiffness=params.get("stiffness", 100.0),
                rest_length=rest,
                damping=params.get("damping", 1.0),
                compression=params.get("compression", 0.0),
            ))
        elif assignment.role == "string":
            side_a, side_b = resolve_anchor_sides(entity, params)
            body_a, anchor_a = to_side(world, side_a)
            body_b, anchor_b = to_side(world, side_b)
            length = params.get("length", 0.0)
            if length == 0.0:
                pa = anchor_a if body_a is None else (
                    world.bodies[body_a].px + anchor_a[0], world.bodies[body_a].py + anchor_a[1]
                )
                pb = anchor_b if body_b is None else (
                    world.bodies[body_b].px + anchor_b[0], world.bodies[body_b].py + anchor_b[1]
                )
                length = math.hypot(pb[0] - pa[0], pb[1] - pa[1])
            world.add_distance(DistanceConstraint(
                id=eid, body_a=body_a, body_b=body_b,
                anchor_a=anchor_a, anchor_b=anchor_b,
                length=length, mode=params.get("mode", "rigid"),
            ))
    return world


def build_optics_scene(project: Project):
    """Returns (OpticalObject, OpticalElement) from the assigned roles."""
    element_ids = project.entities_with_role("lens") + project.entities_with_role("mirror")
    if not element_ids:
        raise UnknownEntity("no lens or mirror role assigned")
    eid = element_ids[0]
    assignment = project.roles[eid]
    bbox = project.entities[eid].bbox
    ex = (bbox[0] + bbox[2]) / 2.0
    axis_y = (bbox[1] + bbox[3]) / 2.0
    aperture = max((bbox[3] - bbox[1]) / 2.0, 1.0)
    variant = assignment.params.get("variant", "convex")

    f = assignment.params.get("focal_length", 0.0)
    if f == 0.0:
        markers = project.entities_with_role("focal-point")
        distances = []
        for mid in markers:
            mb = project.entities[mid].bbox
            mx = (mb[0] + mb[2]) / 2.0
            distances.append(abs(mx - ex))
        magnitude = sum(distances) / len(distances) if distances else aperture * 2.0
        if assignment.role == "lens":
            f = magnitude if variant == "convex" else -magnitude
        else:
            if variant == "plane":
                f = PLANE_MIRROR_F * 10.0
            else:
                f = magnitude if variant == "concave" else -magnitude
    kind = "mirror" if assignment.role == "mirror" else (
        "convex_lens" if variant == "convex" else "concave_lens"
    )
    element = OpticalElement(kind=kind, x=ex, axis_y=axis_y, focal_length=f, aperture=aperture)

    object_ids = project.entities_with_role("projected-object")
    if not object_ids:
        raise UnknownEntity("no projected-object role assigned")
    ob = project.entities[object_ids[0]].bbox
    height = axis_y - ob[1]
    if height <= 0:
        raise ValueError("projected object tip must sit above the optical axis")
    obj = OpticalObject(
        x=(ob[0] + ob[2]) / 2.0, height=height, sprite=object_ids[0]
    )
    return obj, element


def build_circuit_netlist(project: Project) -> Netlist:
    """Stored netlist, or a fresh extraction from the page + sidecar."""
    if project.netlist is not None:
        return project.netlist
    annotations = (project.annotations or {}).get("symbols")
    symbols = detect_symbols(project.page, annotations)
    lines = detect_lines(project.page)
    junctions = detect_junctions(lines)
    netlist = extract_netlist(symbols, lines, junctions)
    project.netlist = netlist
    return netlist


def build_animation(project: Project):
    """Returns (paths by id, tracks) for the animation sim type."""
    paths = {}
    for eid in project.entities_with_role("path"):
        params = project.roles[eid].params
        skeleton = skeletonize(project.entities[eid].mask)
        line = skeleton_to_polyline(skeleton, prune_px=int(params.get("prune_px", 5.0)))
        paths[eid] = parametrize(line, path_id=eid, smooth=bool(params.get("smooth", False)))
    object_ids = set(project.entities)
    tracks = assign_tracks(project.tracks, object_ids, set(paths)) if project.tracks else []
    return paths, tracks
