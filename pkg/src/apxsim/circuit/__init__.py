"""Visual netlist extraction and DC solving via modified nodal analysis."""

from .mesh import solve_dc_mesh
from .netlist import Component, Netlist, edit_component_value, extract_netlist
from .solve import DcSolution, kcl_residuals, measure, solve_dc
from .symbols import SymbolDetection, detect_symbols

__all__ = [
    "Component",
    "DcSolution",
    "Netlist",
    "SymbolDetection",
    "detect_symbols",
    "edit_component_value",
    "extract_netlist",
    "kcl_residuals",
    "measure",
    "solve_dc",
    "solve_dc_mesh",
]
