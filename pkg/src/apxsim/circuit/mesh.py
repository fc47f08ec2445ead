"""Independent brute-force cross-check: loop (mesh) current analysis.

Builds fundamental cycles over a BFS spanning tree and solves KVL per loop.
Deliberately shares no formulation or elimination code with the MNA path;
the linear solve delegates to numpy (LAPACK).
"""

from __future__ import annotations

import numpy as np

from ..errors import SingularSystem
from .netlist import Netlist
from .solve import DcSolution


def solve_dc_mesh(netlist: Netlist) -> DcSolution:
    comps = [c for c in netlist.components if c.kind != "capacitor"]
    nodes = sorted({c.node_a for c in comps} | {c.node_b for c in comps})
    if not comps:
        raise SingularSystem("nothing to solve at DC")

    # adjacency: node -> list of (edge index, other node, direction from node)
    adj: dict[str, list[tuple[int, str, int]]] = {n: [] for n in nodes}
    for e, c in enumerate(comps):
        adj[c.node_a].append((e, c.node_b, +1))
        adj[c.node_b].append((e, c.node_a, -1))

    root = netlist.ref if netlist.ref in adj else nodes[0]
    parent_edge: dict[str, tuple[int, str, int]] = {}
    seen = {root}
    frontier = [root]
    tree_edges = set()
    while frontier:
        node = frontier.pop(0)
        for e, other, direction in sorted(adj[node]):
            if other not in seen:
                seen.add(other)
                parent_edge[other] = (e, node, direction)
                tree_edges.add(e)
                frontier.append(other)
    if len(seen) != len(nodes):
        raise SingularSystem(
            "disconnected network", nodes=sorted(set(nodes) - seen)
        )

    def tree_path(node: str) -> list[tuple[int, int]]:
        """Edges (index, direction-of-travel) from `node` up to the root."""
        path = []
        while node != root:
            e, parent, direction = parent_edge[node]
            # direction stored is node_a->node_b sign seen from the parent side
            path.append((e, -direction))
            node = parent
        return path

    chords = [e for e in range(len(comps)) if e not in tree_edges]
    loops: list[list[tuple[int, int]]] = []
    for e in chords:
        c = comps[e]
        up_a = tree_path(c.node_a)
        up_b = tree_path(c.node_b)
        # strip the common tail toward the root
        while up_a and up_b and up_a[-1][0] == up_b[-1][0]:
            up_a.pop()
            up_b.pop()
        loop = [(e, +1)]  # traverse the chord a -> b
        loop += [(idx, d) for idx, d in up_b]                  # b up to the LCA
        loop += list(reversed([(idx, -d) for idx, d in up_a]))  # LCA down to a
        loops.append(loop)

    branch = np.zeros(len(comps))
    if loops:
        n = len(loops)
        m = np.zeros((n, n))
        rhs = np.zeros(n)
        loop_dir = [dict(loop) for loop in loops]
        for i, loop in enumerate(loops):
            for e, d in loop:
                c = comps[e]
                if c.kind == "resistor":
                    for j in range(n):
                        dj = loop_dir[j].get(e)
                        if dj is not None:
                            m[i, j] += c.value * d * dj
                else:  # battery: drop of +value when traversed plus -> minus
                    plus_first = (c.plus or c.node_a) == c.node_a
                    drop = c.value if plus_first else -c.value
                    rhs[i] -= d * drop
        currents_j = np.linalg.solve(m, rhs)
        for j, loop in enumerate(loops):
            for e, d in loop:
                branch[e] += d * currents_j[j]
    # loop-free networks carry no current; voltages still propagate below

    # node voltages by walking tree edges from the reference
    voltages = {root: 0.0}
    pending = [n_ for n_ in nodes if n_ != root]
    while pending:
        progressed = False
        for node in list(pending):
            e, parent, _ = parent_edge[node]
            if parent not in voltages:
                continue
            c = comps[e]
            i_ab = branch[e]
            if c.kind == "resistor":
                drop_ab = c.value * i_ab  # V_a - V_b
            else:
                plus_first = (c.plus or c.node_a) == c.node_a
                drop_ab = c.value if plus_first else -c.value
            if node == c.node_a:
                voltages[node] = voltages[parent] + drop_ab
            else:
                voltages[node] = voltages[parent] - drop_ab
            pending.remove(node)
            progressed = True
        if not progressed:
            raise SingularSystem("could not propagate node voltages")

    if netlist.ref in voltages and voltages[netlist.ref] != 0.0:
        offset = voltages[netlist.ref]
        voltages = {k: v - offset for k, v in voltages.items()}
    for node in netlist.nodes:
        voltages.setdefault(node, 0.0)

    currents = {c.id: float(branch[e]) for e, c in enumerate(comps)}
    for c in netlist.components:
        if c.kind == "capacitor":
            currents[c.id] = 0.0
    return DcSolution(voltages=voltages, currents=currents)
