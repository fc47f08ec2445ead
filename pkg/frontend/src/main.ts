// App wiring: upload -> segment -> roles -> bind -> run -> drag -> chart.

import { ApiClient, ApiError } from "./api.js";
import { scaleOf, toPolyline, windowed } from "./chart.js";
import { bindingOptions, fieldsFor, rolesFor } from "./inspector.js";
import { CanvasOverlay } from "./overlay.js";
import { SegmentFlow } from "./segmentFlow.js";
import { FrameStream } from "./stream.js";
import { identity, screenToPage, zoomAt } from "./transform.js";
import type { FrameEvent, FramePayload, ProjectInfo } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

declare global {
  interface Window {
    APX_SERVICE?: string;
  }
}

const state = {
  api: new ApiClient(window.APX_SERVICE ?? "http://127.0.0.1:8763"),
  projectId: "",
  project: null as ProjectInfo | null,
  flow: null as SegmentFlow | null,
  overlay: null as CanvasOverlay | null,
  sessionId: "",
  stream: null as FrameStream | null,
  lastPayload: null as FramePayload | null,
  selectedEntity: null as string | null,
  negativeMode: false,
  dragging: false,
  recorderSamples: new Map<string, [number, number][]>(),
};

function toast(message: string): void {
  const el = $("toast");
  el.textContent = message;
  el.classList.add("visible");
  setTimeout(() => el.classList.remove("visible"), 3500);
}

function apiErrorToast(err: unknown): void {
  if (err instanceof ApiError) {
    toast(`${err.code}: ${err.message}`);
  } else {
    toast(String(err));
  }
}

function repaint(): void {
  if (!state.overlay || !state.flow) return;
  state.overlay.render(
    state.flow.entities,
    state.selectedEntity,
    state.flow.prompts,
    state.lastPayload,
  );
  drawChart();
}

function drawChart(): void {
  const canvas = $("chart") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const first = state.recorderSamples.values().next();
  if (first.done || first.value.length === 0) {
    ctx.fillStyle = "#888";
    ctx.fillText("no recorder samples yet", 12, canvas.height / 2);
    return;
  }
  const samples = windowed(first.value, 600);
  const layout = { width: canvas.width, height: canvas.height, padding: 10 };
  const scale = scaleOf(samples);
  if (!scale) return;
  const pts = toPolyline(samples, layout, scale);
  ctx.strokeStyle = "#1464c8";
  ctx.beginPath();
  pts.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
  ctx.stroke();
}

async function refreshProject(): Promise<void> {
  state.project = await state.api.project(state.projectId);
  renderInspector();
}

function renderInspector(): void {
  const project = state.project;
  if (!project) return;
  const roleSel = $("role-select") as HTMLSelectElement;
  roleSel.innerHTML = "";
  for (const role of rolesFor(project.sim_type)) {
    const opt = document.createElement("option");
    opt.value = role;
    opt.textContent = role;
    roleSel.appendChild(opt);
  }
  const bindSel = $("binding-select") as HTMLSelectElement;
  bindSel.innerHTML = "";
  for (const option of bindingOptions(project)) {
    const opt = document.createElement("option");
    opt.value = `${option.tokenId}|${option.path}`;
    opt.textContent = `${option.tokenDisplay} -> ${option.path}`;
    bindSel.appendChild(opt);
  }
  $("sim-type-label").textContent = project.sim_type;
}

async function onUpload(file: File): Promise<void> {
  const buf = new Uint8Array(await file.arrayBuffer());
  let binary = "";
  buf.forEach((b) => (binary += String.fromCharCode(b)));
  const png = btoa(binary);
  const created = await state.api.createProject(png);
  state.projectId = created.project_id;
  state.flow = new SegmentFlow(state.api, state.projectId, created);
  const canvas = $("page-canvas") as HTMLCanvasElement;
  state.overlay = new CanvasOverlay(canvas);
  const img = new Image();
  img.onload = () => {
    state.overlay!.page = img;
    state.overlay!.transform = identity();
    repaint();
  };
  img.src = state.api.pageUrl(state.projectId);
  const rec = await state.api.recommend(state.projectId);
  $("sim-type-label").textContent = `${rec.sim_type} (${rec.rationale})`;
  await refreshProject();
  toast(`project ${state.projectId} ready; recommended ${rec.sim_type}`);
}

function canvasPagePoint(ev: MouseEvent): [number, number] {
  const canvas = $("page-canvas") as HTMLCanvasElement;
  const rect = canvas.getBoundingClientRect();
  const sx = ev.clientX - rect.left;
  const sy = ev.clientY - rect.top;
  return screenToPage(state.overlay!.transform, sx, sy);
}

async function onCanvasClick(ev: MouseEvent): Promise<void> {
  if (!state.flow || !state.overlay || state.dragging) return;
  const [px, py] = canvasPagePoint(ev);
  if (state.sessionId && state.lastPayload?.world) {
    return; // running session: clicks are drags, handled by pointer events
  }
  const accepted = state.flow.addClick(px, py, state.negativeMode || ev.shiftKey);
  if (!accepted) return; // outside the page: no request is sent
  repaint();
}

async function onSegment(): Promise<void> {
  if (!state.flow) return;
  if (!state.flow.canSubmit) {
    toast("add at least one positive click first");
    return;
  }
  try {
    const result = await state.flow.submit();
    state.selectedEntity = result.entity_id;
    await refreshProject();
    repaint();
  } catch (err) {
    apiErrorToast(err);
  }
}

async function onUndo(): Promise<void> {
  if (!state.flow) return;
  const removed = await state.flow.undo();
  if (removed) {
    toast(`removed ${removed}`);
    await refreshProject();
    repaint();
  }
}

async function onAssignRole(): Promise<void> {
  if (!state.selectedEntity) {
    toast("segment and select an entity first");
    return;
  }
  const role = ($("role-select") as HTMLSelectElement).value;
  const params: Record<string, unknown> = {};
  for (const field of fieldsFor(role)) {
    params[field.key] = field.initial;
  }
  try {
    await state.api.assignRole(state.projectId, state.selectedEntity, role, params);
    await refreshProject();
    toast(`${state.selectedEntity} -> ${role}`);
  } catch (err) {
    apiErrorToast(err);
  }
}

async function onCreateBinding(): Promise<void> {
  const value = ($("binding-select") as HTMLSelectElement).value;
  if (!value) return;
  const [tokenId, path] = value.split("|");
  try {
    const binding = await state.api.createBinding(state.projectId, tokenId, path, 0, 10);
    toast(`bound ${binding.display} to ${path}`);
  } catch (err) {
    apiErrorToast(err);
  }
}

async function onRun(): Promise<void> {
  try {
    if (!state.sessionId) {
      const session = await state.api.createSession(state.projectId);
      state.sessionId = session.session_id;
      openStream();
    }
    await state.api.run(state.sessionId);
    toast("running");
  } catch (err) {
    apiErrorToast(err);
  }
}

function openStream(): void {
  state.stream?.close();
  state.stream = new FrameStream(
    state.api.streamUrl(state.sessionId),
    {
      onSnapshot: (event: FrameEvent) => {
        state.lastPayload = event.payload;
        mergeRecorders(event.payload, true);
        repaint();
      },
      onFrame: (event: FrameEvent) => {
        state.lastPayload = event.payload;
        mergeRecorders(event.payload, false);
        repaint();
      },
      onStatus: (status) => {
        $("conn-banner").classList.toggle("visible", status === "disconnected");
      },
    },
    (url) => new WebSocket(url) as never,
  );
  state.stream.connect();
}

function mergeRecorders(payload: FramePayload, replace: boolean): void {
  const recorders = payload.recorders ?? {};
  for (const [rid, samples] of Object.entries(recorders)) {
    if (replace || !state.recorderSamples.has(rid)) {
      state.recorderSamples.set(rid, [...samples]);
    } else {
      state.recorderSamples.get(rid)!.push(...samples);
    }
  }
}

function bodyAt(px: number, py: number): string | null {
  const world = state.lastPayload?.world;
  if (!world || !state.overlay) return null;
  const scale = state.overlay.pixelScale;
  let best: string | null = null;
  let bestDist = 30; // page px grab radius
  for (const body of world.bodies) {
    if (body.role !== "dynamic") continue;
    const d = Math.hypot(body.x / scale - px, body.y / scale - py);
    if (d < bestDist) {
      best = body.id;
      bestDist = d;
    }
  }
  return best;
}

function wirePointerDrag(): void {
  const canvas = $("page-canvas") as HTMLCanvasElement;
  let dragBody: string | null = null;
  let lastSend = 0;
  canvas.addEventListener("pointerdown", (ev) => {
    if (!state.sessionId || !state.lastPayload?.world) return;
    const [px, py] = canvasPagePoint(ev as MouseEvent);
    dragBody = bodyAt(px, py);
    if (dragBody) {
      state.dragging = true;
      canvas.setPointerCapture(ev.pointerId);
    }
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (!dragBody) return;
    const now = performance.now();
    if (now - lastSend < 1000 / 60) return; // command rate capped at tick rate
    lastSend = now;
    const [px, py] = canvasPagePoint(ev as MouseEvent);
    state.api
      .command(state.sessionId, { type: "drag", body: dragBody, x_px: px, y_px: py })
      .catch(apiErrorToast);
  });
  canvas.addEventListener("pointerup", () => {
    if (dragBody) {
      state.api
        .command(state.sessionId, { type: "end_drag", body: dragBody })
        .catch(apiErrorToast);
      dragBody = null;
      setTimeout(() => (state.dragging = false), 0);
    }
  });
}

function wireTokenDrag(): void {
  // dragging a bound token horizontally nudges its value
  const list = $("token-list");
  let active: string | null = null;
  let startX = 0;
  list.addEventListener("pointerdown", (ev) => {
    const target = (ev.target as HTMLElement).closest("[data-binding]");
    if (target) {
      active = target.getAttribute("data-binding");
      startX = ev.clientX;
    }
  });
  window.addEventListener("pointermove", (ev) => {
    if (!active || !state.sessionId) return;
    const delta = ev.clientX - startX;
    if (Math.abs(delta) < 2) return;
    startX = ev.clientX;
    state.api
      .command(state.sessionId, { type: "nudge_binding", binding: active, delta_px: delta })
      .catch(apiErrorToast);
  });
  window.addEventListener("pointerup", () => (active = null));
}

function wireUi(): void {
  ($("file-input") as HTMLInputElement).addEventListener("change", (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (file) onUpload(file).catch(apiErrorToast);
  });
  $("segment-btn").addEventListener("click", () => onSegment());
  $("undo-btn").addEventListener("click", () => onUndo());
  $("negative-toggle").addEventListener("click", () => {
    state.negativeMode = !state.negativeMode;
    $("negative-toggle").classList.toggle("active", state.negativeMode);
  });
  $("role-btn").addEventListener("click", () => onAssignRole());
  $("binding-btn").addEventListener("click", () => onCreateBinding());
  $("run-btn").addEventListener("click", () => onRun());
  $("pause-btn").addEventListener("click", () => {
    if (state.sessionId) state.api.pause(state.sessionId).catch(apiErrorToast);
  });
  $("reset-btn").addEventListener("click", () => {
    if (state.sessionId) state.api.reset(state.sessionId).catch(apiErrorToast);
  });
  const canvas = $("page-canvas") as HTMLCanvasElement;
  canvas.addEventListener("click", (ev) => onCanvasClick(ev));
  canvas.addEventListener("wheel", (ev) => {
    if (!state.overlay) return;
    ev.preventDefault();
    const rect = canvas.getBoundingClientRect();
    state.overlay.transform = zoomAt(
      state.overlay.transform,
      ev.clientX - rect.left,
      ev.clientY - rect.top,
      ev.deltaY < 0 ? 1.15 : 1 / 1.15,
    );
    repaint();
  });
  wirePointerDrag();
  wireTokenDrag();
}

wireUi();
