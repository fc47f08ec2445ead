"""Netlist model and visual extraction from symbols + wires + junctions."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from ..errors import NonPositiveValue, UnknownComponent
from ..vision.lines import Junction, LineSegment

DEFAULT_ATTACH_RADIUS = 8.0

UNIT_FOR_KIND = {"resistor": "ohm", "battery": "volt", "capacitor": "farad"}


@dataclass(frozen=True)
class Component:
    id: str
    kind: str  # resistor | battery | capacitor
    value: float
    node_a: str
    node_b: str
    plus: str | None = None  # node id of the + terminal (battery only)

    def __post_init__(self):
        if self.kind not in UNIT_FOR_KIND:
            raise ValueError(f"bad component kind {self.kind!r}")
        if self.value <= 0:
            raise NonPositiveValue(f"component {self.id} value must be > 0")
        if self.node_a == self.node_b:
            raise ValueError(f"component {self.id} shorts a single node")

    @property
    def unit(self) -> str:
        return UNIT_FOR_KIND[self.kind]


@dataclass(frozen=True)
class Netlist:
    nodes: tuple[str, ...]
    components: tuple[Component, ...]
    ref: str
    warnings: tuple[dict, ...] = ()

    def __post_init__(self):
        if self.ref not in self.nodes:
            raise ValueError("reference node must exist")
        ids = [c.id for c in self.components]
        if len(ids) != len(set(ids)):
            raise ValueError("component ids must be unique")

    def component(self, component_id: str) -> Component:
        for c in self.components:
            if c.id == component_id:
                return c
        raise UnknownComponent(f"no component {component_id!r}")

    def to_json(self) -> dict:
        doc = {
            "nodes": list(self.nodes),
            "ref": self.ref,
            "components": [
                {
                    "id": c.id,
                    "kind": c.kind,
                    "value": c.value,
                    "unit": c.unit,
                    "a": c.node_a,
                    "b": c.node_b,
                    "plus": c.plus,
                }
                for c in self.components
            ],
        }
        if self.warnings:
            doc["warnings"] = [dict(w) for w in self.warnings]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "Netlist":
        components = tuple(
            Component(
                id=c["id"],
                kind=c["kind"],
                value=float(c["value"]),
                node_a=c["a"],
                node_b=c["b"],
                plus=c.get("plus"),
            )
            for c in doc["components"]
        )
        return cls(
            nodes=tuple(doc["nodes"]),
            components=components,
            ref=doc["ref"],
            warnings=tuple(doc.get("warnings", ())),
        )


def edit_component_value(netlist: Netlist, component_id: str, value: float) -> Netlist:
    """Replace one component's value; structure untouched."""
    if value <= 0:
        raise NonPositiveValue(f"value must be > 0, got {value}")
    target = netlist.component(component_id)
    components = tuple(
        replace(c, value=float(value)) if c.id == component_id else c
        for c in netlist.components
    )
    return replace(netlist, components=components)


def _point_dist(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def _seg_interior_dist(seg: LineSegment, p) -> float | None:
    ax, ay = seg.p0
    bx, by = seg.p1
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 == 0:
        return None
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / seg2
    if not (0.05 < t < 0.95):
        return None
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))


def extract_netlist(
    symbols,
    lines: list[LineSegment],
    junctions: list[Junction],
    attach_radius: float = DEFAULT_ATTACH_RADIUS,
) -> Netlist:
    """Connect wires to symbol terminals and merge junction-sharing wires
    into equipotential nodes.

    Crossing wires with no junction are NOT connected. Dangling terminals and
    floating subcircuits are reported as warnings on the netlist; solving is
    refused until they are resolved.
    """
    if not symbols:
        raise ValueError("extraction needs at least one symbol")

    boxes = []
    for sym in symbols:
        x0, y0, x1, y1 = sym.bbox
        boxes.append((x0 - 2, y0 - 2, x1 + 2, y1 + 2))

    def inside_symbol(seg: LineSegment) -> bool:
        for bx0, by0, bx1, by1 in boxes:
            if (
                bx0 <= seg.p0[0] <= bx1 and by0 <= seg.p0[1] <= by1
                and bx0 <= seg.p1[0] <= bx1 and by0 <= seg.p1[1] <= by1
            ):
                return True
        return False

    wires = [seg for seg in lines if not inside_symbol(seg)]
    wires.sort(key=lambda s: (s.p0[1], s.p0[0], s.p1[1], s.p1[0]))

    parent = list(range(len(wires)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    # wires sharing a junction are merged (endpoint clusters and T contacts)
    for junction in junctions:
        incident = []
        for i, seg in enumerate(wires):
            if (
                _point_dist(seg.p0, junction.position) <= attach_radius
                or _point_dist(seg.p1, junction.position) <= attach_radius
            ):
                incident.append(i)
                continue
            d = _seg_interior_dist(seg, junction.position)
            if d is not None and d <= attach_radius:
                incident.append(i)
        for i in incident[1:]:
            union(incident[0], i)

    # wires meeting at the same symbol terminal are one node as well
    terminal_wires: dict[tuple[str, int], list[int]] = {}
    for sym in symbols:
        for t_index, term in enumerate(sym.terminals):
            attached = [
                i
                for i, seg in enumerate(wires)
                if _point_dist(seg.p0, term) <= attach_radius
                or _point_dist(seg.p1, term) <= attach_radius
            ]
            terminal_wires[(sym.id, t_index)] = attached
            for i in attached[1:]:
                union(attached[0], i)

    groups: dict[int, list[int]] = {}
    for i in range(len(wires)):
        groups.setdefault(find(i), []).append(i)

    def group_key(members):
        pts = []
        for i in members:
            pts.append(wires[i].p0)
            pts.append(wires[i].p1)
        return min(pts)

    ordered = sorted(groups.values(), key=group_key)
    node_of_wire: dict[int, str] = {}
    node_ids = []
    for k, members in enumerate(ordered):
        nid = f"n{k}"
        node_ids.append(nid)
        for i in members:
            node_of_wire[i] = nid

    warnings: list[dict] = []
    components: list[Component] = []
    used_nodes: set[str] = set()
    for sym in sorted(symbols, key=lambda s: s.id):
        term_nodes = []
        for t_index, term in enumerate(sym.terminals):
            attached = terminal_wires.get((sym.id, t_index), [])
            if not attached:
                warnings.append({
                    "kind": "dangling_terminal",
                    "component": sym.id,
                    "terminal": [float(term[0]), float(term[1])],
                })
                term_nodes.append(None)
            else:
                term_nodes.append(node_of_wire[attached[0]])
        if None in term_nodes:
            continue
        if term_nodes[0] == term_nodes[1]:
            warnings.append({"kind": "shorted_component", "component": sym.id})
            continue
        plus_node = None
        if sym.kind == "battery" and sym.plus is not None:
            d0 = _point_dist(sym.plus, sym.terminals[0])
            d1 = _point_dist(sym.plus, sym.terminals[1])
            plus_node = term_nodes[0] if d0 <= d1 else term_nodes[1]
        components.append(Component(
            id=sym.id, kind=sym.kind, value=sym.value,
            node_a=term_nodes[0], node_b=term_nodes[1], plus=plus_node,
        ))
        used_nodes.add(term_nodes[0])
        used_nodes.add(term_nodes[1])

    nodes = tuple(n for n in node_ids if n in used_nodes)
    if not nodes:
        nodes = tuple(node_ids[:1]) if node_ids else ("n0",)

    # floating subcircuits: component graph must be connected
    if components:
        adj: dict[str, set[str]] = {n: set() for n in nodes}
        for c in components:
            adj[c.node_a].add(c.node_b)
            adj[c.node_b].add(c.node_a)
        seen = set()
        stack = [nodes[0]]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(adj[n] - seen)
        if len(seen) != len(nodes):
            warnings.append({
                "kind": "floating_subcircuit",
                "nodes": sorted(set(nodes) - seen),
            })

    # reference: most component connections, ties to the lowest id
    counts = {n: 0 for n in nodes}
    for c in components:
        counts[c.node_a] += 1
        counts[c.node_b] += 1
    ref = min(nodes, key=lambda n: (-counts[n], n)) if nodes else "n0"

    return Netlist(
        nodes=nodes,
        components=tuple(components),
        ref=ref,
        warnings=tuple(warnings),
    )
