// Frame stream client: snapshot-first ordering, auto-resubscribe on drop.
// Socket creation is injected so tests can drive a scripted fake.

import type { FrameEvent } from "./types.js";

export interface SocketLike {
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev: { code: number }) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface StreamCallbacks {
  onSnapshot: (event: FrameEvent) => void;
  onFrame: (event: FrameEvent) => void;
  onStatus?: (status: "connected" | "disconnected" | "closed") => void;
}

export class FrameStream {
  private socket: SocketLike | null = null;
  private sawSnapshot = false;
  private stopped = false;
  private reconnectDelayMs = 250;
  private pendingTimer: ReturnType<typeof setTimeout> | null = null;
  lastTick = -1;

  constructor(
    private url: string,
    private callbacks: StreamCallbacks,
    private factory: SocketFactory,
  ) {}

  connect(): void {
    this.stopped = false;
    this.open();
  }

  private open(): void {
    this.sawSnapshot = false;
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onmessage = (ev) => this.handleMessage(ev.data);
    socket.onclose = () => this.handleDrop();
    socket.onerror = () => this.handleDrop();
    this.callbacks.onStatus?.("connected");
  }

  private handleMessage(data: string): void {
    const event = JSON.parse(data) as FrameEvent;
    if (event.type === "close") {
      this.stopped = true;
      this.callbacks.onStatus?.("closed");
      return;
    }
    if (event.type === "snapshot") {
      this.sawSnapshot = true;
      this.lastTick = event.tick;
      this.callbacks.onSnapshot(event);
      return;
    }
    // frames before the snapshot would paint stale deltas; the server sends
    // snapshot-first, so anything else is a protocol violation worth dropping
    if (!this.sawSnapshot) {
      return;
    }
    this.lastTick = event.tick;
    this.callbacks.onFrame(event);
  }

  private handleDrop(): void {
    if (this.stopped) {
      return;
    }
    this.callbacks.onStatus?.("disconnected");
    this.pendingTimer = setTimeout(() => this.open(), this.reconnectDelayMs);
  }

  close(): void {
    this.stopped = true;
    if (this.pendingTimer !== null) {
      clearTimeout(this.pendingTimer);
      this.pendingTimer = null;
    }
    this.socket?.close();
    this.socket = null;
  }
}
