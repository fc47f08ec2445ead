// Click-to-segment state machine: positive/negative clicks accumulate into
// prompts, each request creates an entity, undo removes the newest one.

import type { ApiClient } from "./api.js";
import type { PointPrompt, SegmentResult } from "./types.js";

export interface PageSize {
  width: number;
  height: number;
}

export class SegmentFlow {
  prompts: PointPrompt[] = [];
  entities: SegmentResult[] = [];
  private promptsByEntity = new Map<string, PointPrompt[]>();

  constructor(
    private api: ApiClient,
    private projectId: string,
    private page: PageSize,
  ) {}

  /** Returns false (and sends nothing) for clicks outside the page. */
  addClick(x: number, y: number, negative = false): boolean {
    if (x < 0 || y < 0 || x >= this.page.width || y >= this.page.height) {
      return false;
    }
    this.prompts.push({
      x: Math.floor(x),
      y: Math.floor(y),
      polarity: negative ? "negative" : "positive",
    });
    return true;
  }

  clearPrompts(): void {
    this.prompts = [];
  }

  get canSubmit(): boolean {
    return this.prompts.some((p) => p.polarity === "positive");
  }

  async submit(): Promise<SegmentResult> {
    const used = this.prompts;
    const result = await this.api.segment(this.projectId, used);
    this.entities.push(result);
    this.promptsByEntity.set(result.entity_id, used);
    this.prompts = [];
    return result;
  }

  /** Refine the newest entity: keep its prompts, add a negative click, redo. */
  async refineLast(x: number, y: number): Promise<SegmentResult | null> {
    const last = this.entities[this.entities.length - 1];
    if (!last) {
      return null;
    }
    const previous = this.promptsByEntity.get(last.entity_id) ?? [];
    await this.api.deleteEntity(this.projectId, last.entity_id);
    this.entities.pop();
    this.promptsByEntity.delete(last.entity_id);
    this.prompts = [...previous];
    this.addClick(x, y, true);
    return this.submit();
  }

  async undo(): Promise<string | null> {
    const last = this.entities.pop();
    if (!last) {
      return null;
    }
    this.promptsByEntity.delete(last.entity_id);
    await this.api.deleteEntity(this.projectId, last.entity_id);
    return last.entity_id;
  }
}
