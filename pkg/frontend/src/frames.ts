// Slider-to-FaceFrame sampling: 3 Hz while the engine is perceiving
// (stimulus playing or clarification), silent otherwise. Samples batch up
// and post once per second; a failed post is retried once with the same
// batch before the error is surfaced.

import { isPerceivingPhase } from "./model.js";
import type { Frame } from "./types.js";

export interface SamplerOptions {
  post: (frames: Frame[]) => Promise<unknown>;
  onError?: (error: unknown) => void;
  intervalMs?: number;
  batchSize?: number;
  now?: () => number;
}

export class FrameSampler {
  valence = 0;
  arousal = 0;

  private phase = "";
  private phaseStart = 0;
  private pending: Frame[] = [];
  private timer: ReturnType<typeof setInterval> | null = null;
  private readonly intervalMs: number;
  private readonly batchSize: number;
  private readonly now: () => number;

  constructor(private options: SamplerOptions) {
    this.intervalMs = options.intervalMs ?? 333;
    this.batchSize = options.batchSize ?? 3;
    this.now = options.now ?? (() => Date.now());
  }

  setSliders(valence: number, arousal: number): void {
    this.valence = valence;
    this.arousal = arousal;
  }

  get sampling(): boolean {
    return this.timer !== null;
  }

  setPhase(phase: string): void {
    const wasPerceiving = isPerceivingPhase(this.phase);
    const perceiving = isPerceivingPhase(phase);
    const phaseChanged = phase !== this.phase;
    this.phase = phase;
    if (perceiving && (!wasPerceiving || phaseChanged)) {
      this.phaseStart = this.now();
    }
    if (perceiving && this.timer === null) {
      this.timer = setInterval(() => this.tick(), this.intervalMs);
    } else if (!perceiving && this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
      void this.flush();
    }
  }

  /** One 3 Hz sample; exposed for tests driving time manually. */
  tick(): void {
    if (!isPerceivingPhase(this.phase)) return;
    this.pending.push({
      timestamp_ms: Math.max(0, Math.round(this.now() - this.phaseStart)),
      valence: this.valence,
      arousal: this.arousal,
    });
    if (this.pending.length >= this.batchSize) {
      void this.flush();
    }
  }

  async flush(): Promise<void> {
    if (this.pending.length === 0) return;
    const batch = this.pending.splice(0, this.pending.length);
    try {
      await this.options.post(batch);
    } catch {
      try {
        await this.options.post(batch); // one retry with the buffered batch
      } catch (error) {
        this.options.onError?.(error);
      }
    }
  }

  dispose(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }
}
