import { describe, expect, it } from "vitest";

import {
  applyRecord,
  applyRecords,
  initialView,
  isPerceivingPhase,
  plotModel,
  progressFor,
  validateRating,
  zoneRegions,
} from "../src/model.js";
import type { CommittedRecord, Snapshot, TranscriptRecord } from "../src/types.js";

const rec = (seq: number, kind: "event" | "action", type: string, extra: object = {}): TranscriptRecord =>
  ({ seq, kind, type, ...extra }) as TranscriptRecord;

const SESSION_RECORDS: TranscriptRecord[] = [
  rec(1, "event", "start_session", { subject_id: "ada" }),
  rec(2, "action", "say", { text: "hello there" }),
  rec(3, "action", "play_stimulus", { stimulus_id: "one" }),
  rec(4, "event", "stimulus_finished", { frames: [] }),
  rec(5, "action", "say", { text: "how did it feel?" }),
  rec(6, "event", "utterance_received", { text: "wonderful" }),
  rec(7, "action", "request_rating"),
  rec(8, "event", "rating_received", { rating: 5 }),
];

describe("transcript reduction", () => {
  it("accumulates one line per record and tracks the prompt", () => {
    const view = applyRecords(initialView(), SESSION_RECORDS);
    expect(view.lines).toHaveLength(8);
    expect(view.lines[1]).toEqual({ seq: 2, who: "robot", text: "hello there" });
    expect(view.lines[5]).toEqual({ seq: 6, who: "you", text: "wonderful" });
    expect(view.lastSeq).toBe(8);
    expect(view.currentPrompt).toContain("rate");
  });

  it("drops duplicate sequence numbers on reconnect replay", () => {
    const once = applyRecords(initialView(), SESSION_RECORDS);
    const twice = applyRecords(once, SESSION_RECORDS); // full replay from 0
    expect(twice.lines).toHaveLength(once.lines.length);
    expect(twice).toEqual(once);
  });

  it("is insensitive to where the replay resumes", () => {
    const full = applyRecords(initialView(), SESSION_RECORDS);
    const half = applyRecords(initialView(), SESSION_RECORDS.slice(0, 4));
    const resumed = applyRecords(half, SESSION_RECORDS); // overlap seq 1..4
    expect(resumed).toEqual(full);
  });

  it("toggles awaitingRating around the rating exchange", () => {
    let view = applyRecords(initialView(), SESSION_RECORDS.slice(0, 7));
    expect(view.awaitingRating).toBe(true);
    view = applyRecord(view, SESSION_RECORDS[7]!);
    expect(view.awaitingRating).toBe(false);
  });

  it("captures the final replay list and session end", () => {
    let view = applyRecords(initialView(), SESSION_RECORDS);
    view = applyRecord(view, rec(9, "action", "replay_stimuli", { stimulus_ids: ["a", "b", "c"] }));
    view = applyRecord(view, rec(10, "action", "end_session"));
    expect(view.replayed).toEqual(["a", "b", "c"]);
    expect(view.ended).toBe(true);
  });
});

describe("validateRating", () => {
  it("accepts the five-point scale", () => {
    for (const ok of [1, 2, 3, 4, 5]) expect(validateRating(ok)).toBeNull();
  });
  it("rejects out-of-scale and fractional input", () => {
    expect(validateRating(6)).toMatch(/1 to 5/);
    expect(validateRating(0)).not.toBeNull();
    expect(validateRating(3.5)).not.toBeNull();
    expect(validateRating(Number.NaN)).not.toBeNull();
  });
});

describe("phase gating", () => {
  it("marks only stimulus playback and clarification as perceiving", () => {
    expect(isPerceivingPhase("playing_stimulus")).toBe(true);
    expect(isPerceivingPhase("clarifying")).toBe(true);
    for (const phase of ["await_description", "await_rating", "playback", "done"]) {
      expect(isPerceivingPhase(phase)).toBe(false);
    }
  });
});

// --- plot model -------------------------------------------------------------

const committed = (
  stimulus: string,
  initial: [number, number],
  final: [number, number],
  resolved = true,
): CommittedRecord => ({
  subject_id: "ada",
  stimulus_id: stimulus,
  category: "song",
  initial_scores: { vision: initial[0], language: initial[1] },
  final_scores: { vision: final[0], language: final[1] },
  zone_initial: "mismatch_vision_pos_lang_neg",
  zone_final: "coherent_positive",
  extensions_used: 1,
  resolved,
  rating: 4,
  committed_at: 10,
});

const snapshot = (overrides: Partial<Snapshot> = {}): Snapshot => ({
  session_id: "sid",
  subject_id: "ada",
  created_at: "now",
  phase: "await_rating",
  current_index: 1,
  stimulus_count: 3,
  current_stimulus: { id: "two", category: "song", duration_ms: 4000 },
  extension_count: 0,
  max_extensions: 5,
  top_k: 1,
  zone_config: { theta_vision: 0.075, theta_language: 0.04 },
  initial_scores: { vision: 0.4, language: -0.5 },
  initial_zone: "mismatch_vision_pos_lang_neg",
  last_observation: null,
  observation_zone: null,
  rating: null,
  committed: [],
  last_seq: 12,
  done: false,
  ...overrides,
});

describe("zone regions", () => {
  it("derives the neutral cross from the reported thresholds, not constants", () => {
    const regions = zoneRegions(0.2, 0.1);
    const vertical = regions.find((r) => r.zone === "neutral" && r.y0 === -1 && r.y1 === 1);
    const horizontal = regions.find((r) => r.zone === "neutral" && r.x0 === -1 && r.x1 === 1);
    expect(vertical).toMatchObject({ x0: -0.2, x1: 0.2 });
    expect(horizontal).toMatchObject({ y0: -0.1, y1: 0.1 });
  });

  it("covers all five zones", () => {
    const zones = new Set(zoneRegions(0.075, 0.04).map((r) => r.zone));
    expect(zones).toEqual(
      new Set([
        "coherent_positive",
        "coherent_negative",
        "mismatch_vision_pos_lang_neg",
        "mismatch_vision_neg_lang_pos",
        "neutral",
      ]),
    );
  });
});

describe("plot model", () => {
  it("maps markers 1:1 to committed associations plus one live point", () => {
    const snap = snapshot({
      committed: [committed("one", [0.4, -0.5], [0.8, -0.25])],
    });
    const model = plotModel(snap);
    expect(model.markers).toHaveLength(1);
    expect(model.markers[0]).toMatchObject({
      stimulusId: "one",
      moved: true,
      initial: { vision: 0.4, language: -0.5 },
      final: { vision: 0.8, language: -0.25 },
    });
    expect(model.live).toEqual({ vision: 0.4, language: -0.5 });
  });

  it("shows no live point outside await_rating/clarifying", () => {
    const model = plotModel(snapshot({ phase: "playing_stimulus" }));
    expect(model.live).toBeNull();
  });

  it("marks unmoved markers so they render without a shift segment", () => {
    const snap = snapshot({
      phase: "done",
      committed: [committed("one", [0.5, 0.5], [0.5, 0.5])],
    });
    expect(plotModel(snap).markers[0]!.moved).toBe(false);
  });

  it("threads the snapshot's thresholds into the regions", () => {
    const snap = snapshot({ zone_config: { theta_vision: 0.3, theta_language: 0.2 } });
    const vertical = plotModel(snap).regions.find(
      (r) => r.zone === "neutral" && r.y1 === 1 && r.y0 === -1,
    );
    expect(vertical).toMatchObject({ x0: -0.3, x1: 0.3 });
  });
});

describe("progress", () => {
  it("formats i-of-N with the stimulus id", () => {
    expect(progressFor(snapshot()).label).toBe("two (2 of 3)");
  });
});
