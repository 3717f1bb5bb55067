import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { TranscriptStream, type EventSourceLike } from "../src/stream.js";
import type { TranscriptRecord } from "../src/types.js";

class FakeEventSource implements EventSourceLike {
  listeners = new Map<string, Array<(ev: MessageEvent) => void>>();
  onerror: ((this: unknown, ev: unknown) => unknown) | null = null;
  onopen: ((this: unknown, ev: unknown) => unknown) | null = null;
  closed = false;

  constructor(public url: string) {}

  addEventListener(type: string, listener: (ev: MessageEvent) => void): void {
    const existing = this.listeners.get(type) ?? [];
    existing.push(listener);
    this.listeners.set(type, existing);
  }

  close(): void {
    this.closed = true;
  }

  emit(type: string, data?: unknown): void {
    for (const listener of this.listeners.get(type) ?? []) {
      listener({ data: JSON.stringify(data) } as MessageEvent);
    }
  }

  fail(): void {
    this.onerror?.call(null, {});
  }
}

const record = (seq: number): TranscriptRecord => ({ seq, kind: "event", type: "playback_finished" });

describe("TranscriptStream", () => {
  let sources: FakeEventSource[];
  let received: number[];
  let statuses: string[];
  let ended: boolean;
  let stream: TranscriptStream;

  beforeEach(() => {
    vi.useFakeTimers();
    sources = [];
    received = [];
    statuses = [];
    ended = false;
    stream = new TranscriptStream(
      (fromSeq) => `/stream?from=${fromSeq}`,
      {
        onRecord: (rec) => received.push(rec.seq),
        onEnd: () => {
          ended = true;
        },
        onStatus: (status) => statuses.push(status),
      },
      (url) => {
        const source = new FakeEventSource(url);
        sources.push(source);
        return source;
      },
      500,
    );
  });

  afterEach(() => {
    vi.useRealTimers();
  });

  it("subscribes from 0 and forwards records in order", () => {
    stream.start(0);
    expect(sources[0]!.url).toBe("/stream?from=0");
    for (const seq of [1, 2, 3]) sources[0]!.emit("record", record(seq));
    expect(received).toEqual([1, 2, 3]);
  });

  it("drops duplicate sequence numbers", () => {
    stream.start(0);
    for (const seq of [1, 2, 2, 1, 3]) sources[0]!.emit("record", record(seq));
    expect(received).toEqual([1, 2, 3]);
  });

  it("reconnects from the last seen sequence number after an error", () => {
    stream.start(0);
    sources[0]!.emit("record", record(1));
    sources[0]!.emit("record", record(2));
    sources[0]!.fail();
    expect(statuses).toContain("retrying");
    vi.advanceTimersByTime(500);
    expect(sources).toHaveLength(2);
    expect(sources[1]!.url).toBe("/stream?from=2");

    // Server replays at-least-once; duplicates are invisible to the consumer.
    sources[1]!.emit("record", record(2));
    sources[1]!.emit("record", record(3));
    expect(received).toEqual([1, 2, 3]);
  });

  it("signals end-of-stream and closes", () => {
    stream.start(0);
    sources[0]!.emit("record", record(1));
    sources[0]!.emit("end", {});
    expect(ended).toBe(true);
    expect(sources[0]!.closed).toBe(true);
    // No reconnect after a clean end.
    vi.advanceTimersByTime(5000);
    expect(sources).toHaveLength(1);
  });

  it("stop() prevents any further reconnects", () => {
    stream.start(0);
    sources[0]!.fail();
    stream.stop();
    vi.advanceTimersByTime(5000);
    expect(sources).toHaveLength(1);
  });
});
