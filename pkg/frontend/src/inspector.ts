// Inspector panel model: role choices per simulation type, parameter fields
// per role, and the token/property pairs offered by the binding dropdown.
// Mirrors the service's role schemas; the server still validates everything.

import type { ProjectInfo } from "./types.js";

export const ROLES_BY_SIM_TYPE: Record<string, string[]> = {
  kinematics: ["dynamic-object", "static-object", "spring", "string"],
  optics: ["lens", "mirror", "focal-point", "projected-object"],
  circuits: ["circuit-component"],
  animation: ["path"],
};

export interface ParamField {
  key: string;
  kind: "number" | "bool" | "choice";
  min?: number;
  max?: number;
  step?: number;
  choices?: string[];
  initial: number | boolean | string;
}

const PARAM_FIELDS: Record<string, ParamField[]> = {
  "dynamic-object": [
    { key: "mass", kind: "number", min: 0.01, max: 100, step: 0.1, initial: 1.0 },
    { key: "friction", kind: "number", min: 0, max: 2, step: 0.05, initial: 0.5 },
    { key: "restitution", kind: "number", min: 0, max: 1, step: 0.05, initial: 0.0 },
    { key: "lock_rotation", kind: "bool", initial: false },
  ],
  "static-object": [
    { key: "friction", kind: "number", min: 0, max: 2, step: 0.05, initial: 0.5 },
    { key: "restitution", kind: "number", min: 0, max: 1, step: 0.05, initial: 0.0 },
  ],
  spring: [
    { key: "stiffness", kind: "number", min: 1, max: 5000, step: 1, initial: 100 },
    { key: "damping", kind: "number", min: 0, max: 100, step: 0.5, initial: 1 },
    { key: "rest_length", kind: "number", min: 0, max: 10, step: 0.01, initial: 0 },
    { key: "compression", kind: "number", min: -2, max: 2, step: 0.01, initial: 0 },
  ],
  string: [
    { key: "length", kind: "number", min: 0, max: 10, step: 0.01, initial: 0 },
    { key: "mode", kind: "choice", choices: ["rigid", "rope"], initial: "rigid" },
  ],
  lens: [
    { key: "variant", kind: "choice", choices: ["convex", "concave"], initial: "convex" },
    { key: "focal_length", kind: "number", min: -2000, max: 2000, step: 1, initial: 0 },
  ],
  mirror: [
    { key: "variant", kind: "choice", choices: ["concave", "convex", "plane"], initial: "concave" },
    { key: "focal_length", kind: "number", min: -2000, max: 2000, step: 1, initial: 0 },
  ],
  "focal-point": [],
  "projected-object": [],
  "circuit-component": [
    { key: "kind", kind: "choice", choices: ["resistor", "battery", "capacitor"], initial: "resistor" },
    { key: "value", kind: "number", min: 0.001, max: 1e6, step: 1, initial: 100 },
  ],
  path: [
    { key: "smooth", kind: "bool", initial: false },
    { key: "prune_px", kind: "number", min: 0, max: 100, step: 1, initial: 5 },
  ],
};

export function rolesFor(simType: string): string[] {
  return ROLES_BY_SIM_TYPE[simType] ?? [];
}

export function fieldsFor(role: string): ParamField[] {
  return PARAM_FIELDS[role] ?? [];
}

export interface BindingOption {
  tokenId: string;
  tokenDisplay: string;
  path: string;
}

/** Every (token, property) pair the binding dropdown offers: numeric tokens
 *  against numeric parameters of assigned roles, plus component values. */
export function bindingOptions(project: ProjectInfo): BindingOption[] {
  const paths: string[] = [];
  for (const role of project.roles) {
    for (const field of fieldsFor(role.role)) {
      if (field.kind === "number") {
        paths.push(`${role.entity_id}.${field.key}`);
      }
    }
  }
  const netlist = project.netlist as { components?: { id: string }[] } | null;
  if (netlist?.components) {
    for (const comp of netlist.components) {
      paths.push(`${comp.id}.value`);
    }
  }
  const options: BindingOption[] = [];
  for (const token of project.tokens) {
    for (const path of paths) {
      options.push({ tokenId: token.id, tokenDisplay: token.display, path });
    }
  }
  return options;
}
