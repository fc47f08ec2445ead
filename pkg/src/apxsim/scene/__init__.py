"""Authoring document model, roles, bindings, recorders, persistence."""

from .build import (
    build_animation,
    build_circuit_netlist,
    build_kinematics_world,
    build_optics_scene,
)
from .model import Binding, Entity, Project, Recorder, RoleAssignment, TextToken
from .persist import load_project, project_from_doc, project_to_doc, save_project
from .recommend import recommend_sim_type
from .roles import ROLE_SCHEMAS, SIM_TYPES, legal_roles, validate_role_params

__all__ = [
    "Binding",
    "Entity",
    "Project",
    "ROLE_SCHEMAS",
    "Recorder",
    "RoleAssignment",
    "SIM_TYPES",
    "TextToken",
    "build_animation",
    "build_circuit_netlist",
    "build_kinematics_world",
    "build_optics_scene",
    "legal_roles",
    "load_project",
    "project_from_doc",
    "project_to_doc",
    "recommend_sim_type",
    "save_project",
    "validate_role_params",
]
