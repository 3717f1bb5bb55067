// Resumable SSE subscription to one session's transcript.
//
// Dedup happens here by sequence number (delivery is at-least-once), and a
// dropped connection reconnects from the last sequence actually seen, so the
// consumer observes every record exactly once and in order.

import type { TranscriptRecord } from "./types.js";

export interface EventSourceLike {
  addEventListener(type: string, listener: (ev: MessageEvent) => void): void;
  close(): void;
  onerror: ((this: unknown, ev: unknown) => unknown) | null;
  onopen: ((this: unknown, ev: unknown) => unknown) | null;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

export interface StreamHandlers {
  onRecord: (rec: TranscriptRecord) => void;
  onEnd?: () => void;
  onStatus?: (status: "connecting" | "open" | "retrying") => void;
}

export class TranscriptStream {
  lastSeq = 0;
  private source: EventSourceLike | null = null;
  private stopped = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private urlFor: (fromSeq: number) => string,
    private handlers: StreamHandlers,
    private factory: EventSourceFactory = (url) => new EventSource(url) as EventSourceLike,
    private retryMs = 1000,
  ) {}

  start(fromSeq?: number): void {
    if (fromSeq !== undefined) this.lastSeq = fromSeq;
    this.stopped = false;
    this.open();
  }

  stop(): void {
    this.stopped = true;
    if (this.retryTimer !== null) clearTimeout(this.retryTimer);
    this.source?.close();
    this.source = null;
  }

  private open(): void {
    this.handlers.onStatus?.("connecting");
    const source = this.factory(this.urlFor(this.lastSeq));
    this.source = source;
    source.onopen = () => this.handlers.onStatus?.("open");
    source.addEventListener("record", (ev) => {
      const rec = JSON.parse(ev.data) as TranscriptRecord;
      if (rec.seq <= this.lastSeq) return; // duplicate delivery after reconnect
      this.lastSeq = rec.seq;
      this.handlers.onRecord(rec);
    });
    source.addEventListener("end", () => {
      this.stop();
      this.handlers.onEnd?.();
    });
    source.onerror = () => {
      if (this.stopped) return;
      source.close();
      this.handlers.onStatus?.("retrying");
      this.retryTimer = setTimeout(() => {
        if (!this.stopped) this.open();
      }, this.retryMs);
    };
  }
}
