// Thin typed wrappers over the service HTTP API. No simulation logic lives
// here: these return server responses verbatim.

import type { FrameEvent, PointPrompt, ProjectInfo, SegmentResult } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details: unknown = {},
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    public baseUrl: string,
    private fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body !== undefined ? { "content-type": "application/json" } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const text = await resp.text();
    const doc = text ? JSON.parse(text) : {};
    if (!resp.ok) {
      throw new ApiError(resp.status, doc.error ?? "error", doc.message ?? resp.statusText, doc.details);
    }
    return doc as T;
  }

  createProject(pngBase64: string, simType?: string, annotations?: unknown) {
    return this.request<{ project_id: string; width: number; height: number; sim_type: string }>(
      "POST",
      "/projects",
      { png: pngBase64, sim_type: simType, annotations },
    );
  }

  project(projectId: string) {
    return this.request<ProjectInfo>("GET", `/projects/${projectId}`);
  }

  pageUrl(projectId: string): string {
    return `${this.baseUrl}/projects/${projectId}/page.png`;
  }

  segment(projectId: string, prompts: PointPrompt[], box?: [number, number, number, number]) {
    return this.request<SegmentResult>("POST", `/projects/${projectId}/segment`, { prompts, box });
  }

  deleteEntity(projectId: string, entityId: string) {
    return this.request<{ deleted: string }>("DELETE", `/projects/${projectId}/entities/${entityId}`);
  }

  assignRole(projectId: string, entityId: string, role: string, params?: Record<string, unknown>) {
    return this.request("POST", `/projects/${projectId}/roles`, {
      entity_id: entityId,
      role,
      params,
    });
  }

  recommend(projectId: string) {
    return this.request<{ sim_type: string; rationale: string }>(
      "POST",
      `/projects/${projectId}/recommend`,
      {},
    );
  }

  setSimType(projectId: string, simType: string) {
    return this.request("POST", `/projects/${projectId}/sim_type`, { sim_type: simType });
  }

  createBinding(projectId: string, tokenId: string, path: string, min: number, max: number, step?: number) {
    return this.request<{ binding_id: string; display: string }>(
      "POST",
      `/projects/${projectId}/bindings`,
      { token_id: tokenId, path, min, max, step },
    );
  }

  createRecorder(projectId: string, path: string, window = 600) {
    return this.request<{ recorder_id: string }>(
      "POST",
      `/projects/${projectId}/recorders`,
      { path, window },
    );
  }

  createSession(projectId: string) {
    return this.request<{ session_id: string; kind: string; status: string }>(
      "POST",
      `/projects/${projectId}/sessions`,
      {},
    );
  }

  run(sessionId: string) {
    return this.request("POST", `/sessions/${sessionId}/run`);
  }

  pause(sessionId: string) {
    return this.request("POST", `/sessions/${sessionId}/pause`);
  }

  reset(sessionId: string) {
    return this.request("POST", `/sessions/${sessionId}/reset`);
  }

  advance(sessionId: string, ticks: number) {
    return this.request<{ tick: number }>("POST", `/sessions/${sessionId}/advance`, { ticks });
  }

  command(sessionId: string, command: Record<string, unknown>) {
    return this.request<{ applied_tick: number }>(
      "POST",
      `/sessions/${sessionId}/commands`,
      command,
    );
  }

  latestFrame(sessionId: string) {
    return this.request<FrameEvent>("GET", `/sessions/${sessionId}/frame`);
  }

  sessionState(sessionId: string) {
    return this.request<{ session_id: string; kind: string; status: string; tick: number }>(
      "GET",
      `/sessions/${sessionId}`,
    );
  }

  streamUrl(sessionId: string): string {
    return this.baseUrl.replace(/^http/, "ws") + `/sessions/${sessionId}/stream`;
  }
}
