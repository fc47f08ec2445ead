"""DC steady-state solution by modified nodal analysis.

Conductance stamps for resistors, one extra unknown per voltage source,
capacitors open. The linear system is eliminated here directly (dense
Gaussian elimination with partial pivoting); the mesh-current module provides
an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SingularSystem, UnknownNode, UnresolvedNetlist
from .netlist import Netlist


@dataclass(frozen=True)
class DcSolution:
    voltages: dict[str, float]   # node -> volts, reference = 0
    currents: dict[str, float]   # component -> amps, positive a -> b

    def to_json(self) -> dict:
        return {"voltages": dict(self.voltages), "currents": dict(self.currents)}


def _gaussian_solve(matrix: np.ndarray, rhs: np.ndarray, labels: list[str]) -> np.ndarray:
    n = len(rhs)
    m = np.column_stack([matrix.astype(float), rhs.astype(float)])
    scale = max(1.0, float(np.abs(m[:, :n]).max()))
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(m[col:, col])))
        if abs(m[pivot_row, col]) < 1e-12 * scale:
            raise SingularSystem(
                f"singular system at unknown {labels[col]!r}",
                unknown=labels[col],
            )
        if pivot_row != col:
            m[[col, pivot_row]] = m[[pivot_row, col]]
        for row in range(col + 1, n):
            factor = m[row, col] / m[col, col]
            if factor != 0.0:
                m[row, col:] -= factor * m[col, col:]
    x = np.zeros(n)
    for row in range(n - 1, -1, -1):
        x[row] = (m[row, n] - m[row, row + 1 : n] @ x[row + 1 : n]) / m[row, row]
    return x


def solve_dc(netlist: Netlist) -> DcSolution:
    """Node voltages and branch currents of a resistive network with ideal
    voltage sources; capacitors are treated as open circuits."""
    if netlist.warnings:
        raise UnresolvedNetlist(
            "netlist has unresolved extraction warnings",
            warnings=[dict(w) for w in netlist.warnings],
        )
    sources = [c for c in netlist.components if c.kind == "battery"]
    if not sources:
        raise SingularSystem("no voltage source in the netlist")

    # every node needs a conductive attachment once capacitors drop out
    conductive: set[str] = set()
    for c in netlist.components:
        if c.kind != "capacitor":
            conductive.add(c.node_a)
            conductive.add(c.node_b)
    isolated = [n for n in netlist.nodes if n not in conductive]
    if isolated:
        raise SingularSystem(
            f"nodes isolated at DC (capacitor-only attachments): {isolated}",
            nodes=isolated,
        )

    unknown_nodes = [n for n in netlist.nodes if n != netlist.ref]
    index = {n: i for i, n in enumerate(unknown_nodes)}
    n_nodes = len(unknown_nodes)
    n_total = n_nodes + len(sources)
    a = np.zeros((n_total, n_total))
    z = np.zeros(n_total)
    labels = list(unknown_nodes) + [f"I({s.id})" for s in sources]

    for c in netlist.components:
        if c.kind == "resistor":
            g = 1.0 / c.value
            ia = index.get(c.node_a)
            ib = index.get(c.node_b)
            if ia is not None:
                a[ia, ia] += g
            if ib is not None:
                a[ib, ib] += g
            if ia is not None and ib is not None:
                a[ia, ib] -= g
                a[ib, ia] -= g

    for k, s in enumerate(sources):
        row = n_nodes + k
        plus = s.plus or s.node_a
        minus = s.node_b if plus == s.node_a else s.node_a
        ip = index.get(plus)
        im = index.get(minus)
        if ip is not None:
            a[row, ip] = 1.0
            a[ip, row] += 1.0
        if im is not None:
            a[row, im] = -1.0
            a[im, row] -= 1.0
        z[row] = s.value

    x = _gaussian_solve(a, z, labels)

    voltages = {netlist.ref: 0.0}
    for node, i in index.items():
        voltages[node] = float(x[i])

    currents: dict[str, float] = {}
    source_index = {s.id: k for k, s in enumerate(sources)}
    for c in netlist.components:
        if c.kind == "resistor":
            currents[c.id] = (voltages[c.node_a] - voltages[c.node_b]) / c.value
        elif c.kind == "capacitor":
            currents[c.id] = 0.0
        else:
            i_src = float(x[n_nodes + source_index[c.id]])
            plus = c.plus or c.node_a
            # unknown is the current flowing plus -> minus through the source
            currents[c.id] = i_src if plus == c.node_a else -i_src
    return DcSolution(voltages=voltages, currents=currents)


def measure(solution: DcSolution, node_a: str, node_b: str) -> float:
    """Voltage between two points: V(a) - V(b)."""
    for n in (node_a, node_b):
        if n not in solution.voltages:
            raise UnknownNode(f"no node {n!r}")
    return solution.voltages[node_a] - solution.voltages[node_b]


def kcl_residuals(netlist: Netlist, solution: DcSolution) -> dict[str, float]:
    """Per-node signed current imbalance (should vanish by KCL)."""
    residual = {n: 0.0 for n in netlist.nodes}
    for c in netlist.components:
        i = solution.currents[c.id]
        residual[c.node_a] -= i
        residual[c.node_b] += i
    return residual
