"""Rule-based simulation-type recommendation (hosted recommender seam)."""

from __future__ import annotations

from ..circuit.symbols import detect_symbols
from ..vision.lines import detect_lines
from .model import Project
from .roles import SIM_TYPES

_OPTICS_ROLES = {"lens", "mirror", "focal-point", "projected-object"}


def recommend_sim_type(project: Project, external: str | None = None):
    """Priority rules: external plugin suggestion, circuit symbols, optics
    signatures, then the kinematics default. Returns (sim_type, rationale)."""
    external = external or project.external_recommendation
    if external:
        if external not in SIM_TYPES:
            raise ValueError(f"external recommendation {external!r} is not a sim type")
        return external, "external recommender suggestion"

    symbol_count = 0
    if project.netlist is not None and project.netlist.components:
        symbol_count = len(project.netlist.components)
    else:
        annotations = project.annotations or {}
        sidecar_symbols = annotations.get("symbols") or ()
        if sidecar_symbols:
            symbol_count = len(sidecar_symbols)
        else:
            symbol_count = len(detect_symbols(project.page))
    if symbol_count:
        return "circuits", f"{symbol_count} circuit symbol(s) detected"

    roles = {r.role for r in project.roles.values()}
    if roles & _OPTICS_ROLES:
        return "optics", "optics roles present"

    # tall thin segment crossed by near-horizontal strokes reads as a lens
    lines = None
    for entity in sorted(project.entities.values(), key=lambda e: e.id):
        x0, y0, x1, y1 = entity.bbox
        w, h = x1 - x0, y1 - y0
        if h >= 3 * max(w, 1):
            if lines is None:
                lines = [s for s in detect_lines(project.page) if s.orientation == "horizontal"]
            crossing = [
                s for s in lines
                if s.p0[0] < x0 and s.p1[0] > x1 and y0 <= s.p0[1] <= y1
            ]
            if len(crossing) >= 2:
                return "optics", f"tall thin element crossed by {len(crossing)} rays"

    return "kinematics", "default"
