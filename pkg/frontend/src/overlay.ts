// Canvas overlay: four stacked layers sharing one page-space transform.
// Layer order: page bitmap, entity highlights, simulation output, interaction
// markers. Only drawing lives here; geometry comes from transform.ts.

import { pageToScreen, rectToScreen, type ViewTransform } from "./transform.js";
import type { BodyState, FramePayload, PointPrompt, RaySegment, SegmentResult } from "./types.js";

const HIGHLIGHT_COLORS = ["#12a05a", "#1464c8", "#c88c14", "#9632c8", "#c83214"];

export class CanvasOverlay {
  private ctx: CanvasRenderingContext2D;
  page: HTMLImageElement | null = null;
  transform: ViewTransform = { zoom: 1, panX: 0, panY: 0 };
  pixelScale = 0.01; // meters per page pixel, from the project's world config

  constructor(private canvas: HTMLCanvasElement) {
    const ctx = canvas.getContext("2d");
    if (!ctx) {
      throw new Error("2d canvas unavailable");
    }
    this.ctx = ctx;
  }

  render(
    entities: SegmentResult[],
    selected: string | null,
    prompts: PointPrompt[],
    payload: FramePayload | null,
  ): void {
    const { ctx, canvas, transform } = this;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    if (this.page) {
      ctx.save();
      ctx.setTransform(transform.zoom, 0, 0, transform.zoom, transform.panX, transform.panY);
      ctx.imageSmoothingEnabled = transform.zoom < 1;
      ctx.drawImage(this.page, 0, 0);
      ctx.restore();
    }
    this.drawEntities(entities, selected);
    if (payload) {
      this.drawSimulation(payload);
    }
    this.drawPrompts(prompts);
  }

  private drawEntities(entities: SegmentResult[], selected: string | null): void {
    const { ctx, transform } = this;
    entities.forEach((entity, i) => {
      const color = HIGHLIGHT_COLORS[i % HIGHLIGHT_COLORS.length];
      ctx.strokeStyle = color;
      ctx.lineWidth = entity.entity_id === selected ? 3 : 1.5;
      ctx.beginPath();
      entity.contour.forEach(([x, y], k) => {
        const [sx, sy] = pageToScreen(transform, x, y);
        if (k === 0) {
          ctx.moveTo(sx, sy);
        } else {
          ctx.lineTo(sx, sy);
        }
      });
      ctx.closePath();
      ctx.stroke();
      const [x0, y0, x1, y1] = rectToScreen(transform, entity.bbox);
      ctx.strokeRect(x0, y0, x1 - x0, y1 - y0);
    });
  }

  private drawSimulation(payload: FramePayload): void {
    if (payload.world) {
      this.drawBodies(payload.world.bodies);
    }
    if (payload.rays) {
      this.drawRays(payload.rays);
    }
    if (payload.poses) {
      this.drawPoses(payload.poses);
    }
  }

  private drawBodies(bodies: BodyState[]): void {
    const { ctx, transform } = this;
    for (const body of bodies) {
      const [sx, sy] = pageToScreen(
        transform,
        body.x / this.pixelScale,
        body.y / this.pixelScale,
      );
      ctx.save();
      ctx.translate(sx, sy);
      ctx.rotate(body.angle);
      ctx.fillStyle = body.role === "dynamic" ? "rgba(220,70,50,0.7)" : "rgba(90,90,110,0.5)";
      ctx.beginPath();
      ctx.arc(0, 0, 5 * transform.zoom, 0, 2 * Math.PI);
      ctx.fill();
      ctx.strokeStyle = "#222";
      ctx.beginPath();
      ctx.moveTo(0, 0);
      ctx.lineTo(8 * transform.zoom, 0);
      ctx.stroke();
      ctx.restore();
    }
  }

  private drawRays(rays: RaySegment[][]): void {
    const { ctx, transform } = this;
    ctx.lineWidth = 2;
    for (const path of rays) {
      for (const seg of path) {
        ctx.strokeStyle = seg.style === "virtual" ? "#1464c8" : "#c83214";
        ctx.setLineDash(seg.style === "virtual" ? [6, 4] : []);
        const [x0, y0] = pageToScreen(transform, seg.p0[0], seg.p0[1]);
        const [x1, y1] = pageToScreen(transform, seg.p1[0], seg.p1[1]);
        ctx.beginPath();
        ctx.moveTo(x0, y0);
        ctx.lineTo(x1, y1);
        ctx.stroke();
      }
    }
    ctx.setLineDash([]);
  }

  private drawPoses(poses: Record<string, { x: number; y: number; angle: number }>): void {
    const { ctx, transform } = this;
    for (const pose of Object.values(poses)) {
      const [sx, sy] = pageToScreen(transform, pose.x, pose.y);
      ctx.fillStyle = "rgba(230,140,30,0.85)";
      ctx.beginPath();
      ctx.arc(sx, sy, 6 * transform.zoom, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  private drawPrompts(prompts: PointPrompt[]): void {
    const { ctx, transform } = this;
    for (const prompt of prompts) {
      const [sx, sy] = pageToScreen(transform, prompt.x, prompt.y);
      ctx.fillStyle = prompt.polarity === "positive" ? "#12a05a" : "#c83214";
      ctx.beginPath();
      ctx.arc(sx, sy, 4, 0, 2 * Math.PI);
      ctx.fill();
      ctx.strokeStyle = "#fff";
      ctx.stroke();
    }
  }
}
