// Wire types mirroring the service's HTTP/WS JSON contracts.

export interface ProjectInfo {
  project_id: string;
  sim_type: string;
  page: { width: number; height: number };
  entities: EntityInfo[];
  tokens: TokenInfo[];
  roles: RoleInfo[];
  bindings: BindingInfo[];
  recorders: string[];
  netlist: unknown;
}

export interface EntityInfo {
  id: string;
  bbox: [number, number, number, number];
  label: string;
  pixel_count: number;
}

export interface TokenInfo {
  id: string;
  value: number;
  unit: string;
  bbox: [number, number, number, number];
  display: string;
}

export interface RoleInfo {
  entity_id: string;
  role: string;
  params: Record<string, unknown>;
}

export interface BindingInfo {
  id: string;
  token_id: string;
  path: string;
  min: number;
  max: number;
  step: number;
}

export interface SegmentResult {
  entity_id: string;
  bbox: [number, number, number, number];
  pixel_count: number;
  contour: [number, number][];
}

export interface FrameEvent {
  type: "snapshot" | "frame" | "close";
  session: string;
  tick: number;
  ts: number;
  payload: FramePayload;
  reason?: string;
}

export interface FramePayload {
  kind: string;
  world?: {
    time: number;
    bodies: BodyState[];
    constraints: unknown[];
  };
  rays?: RaySegment[][];
  image?: { distance: number | null; height: number | null; magnification: number | null; nature: string };
  solution?: { voltages: Record<string, number>; currents: Record<string, number> };
  netlist?: unknown;
  poses?: Record<string, { x: number; y: number; angle: number; finished: boolean }>;
  recorders?: Record<string, [number, number][]>;
  [key: string]: unknown;
}

export interface BodyState {
  id: string;
  role: string;
  x: number;
  y: number;
  angle: number;
  vx: number;
  vy: number;
  omega: number;
  mass?: number;
  inertia?: number;
}

export interface RaySegment {
  p0: [number, number];
  p1: [number, number];
  style: "real" | "virtual";
}

export interface PointPrompt {
  x: number;
  y: number;
  polarity: "positive" | "negative";
}
