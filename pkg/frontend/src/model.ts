// Pure view-model logic: transcript reduction over stream records and the
// affective-space plot model. No DOM, no network; everything here is the
// unit-testable core of the client.
//
// The client never simulates engine logic: transcript lines come only from
// stream records, and all numeric state (scores, zones, phase, committed
// associations) comes from service snapshots.

import type { CommittedRecord, Scores, Snapshot, TranscriptRecord } from "./types.js";

export interface TranscriptLine {
  seq: number;
  who: "robot" | "you" | "system";
  text: string;
}

export interface ViewState {
  lastSeq: number;
  lines: TranscriptLine[];
  currentPrompt: string | null;
  awaitingRating: boolean;
  replayed: string[] | null;
  ended: boolean;
}

export function initialView(): ViewState {
  return {
    lastSeq: 0,
    lines: [],
    currentPrompt: null,
    awaitingRating: false,
    replayed: null,
    ended: false,
  };
}

function lineFor(rec: TranscriptRecord): TranscriptLine | null {
  const seq = rec.seq;
  if (rec.kind === "action") {
    switch (rec.type) {
      case "say":
        return { seq, who: "robot", text: rec.text ?? "" };
      case "play_stimulus":
        return { seq, who: "system", text: `[playing ${rec.stimulus_id}]` };
      case "request_rating":
        return { seq, who: "robot", text: "(please rate it from 1 to 5)" };
      case "replay_stimuli":
        return { seq, who: "system", text: `[replaying: ${(rec.stimulus_ids ?? []).join(", ")}]` };
      case "end_session":
        return { seq, who: "system", text: "[session complete]" };
      default:
        return { seq, who: "system", text: `[${rec.type}]` };
    }
  }
  switch (rec.type) {
    case "start_session":
      return { seq, who: "system", text: `[session started for ${rec.subject_id}]` };
    case "stimulus_finished":
      return { seq, who: "system", text: `[reaction captured: ${(rec.frames ?? []).length} frames]` };
    case "utterance_received":
      return { seq, who: "you", text: rec.text ?? "" };
    case "rating_received":
      return { seq, who: "you", text: `(rated it ${rec.rating}/5)` };
    case "playback_finished":
      return { seq, who: "system", text: "[playback finished]" };
    case "final_feedback":
      return {
        seq,
        who: "you",
        text: `(top picks replayed: ${rec.top_hits}, bottom picks replayed: ${rec.bottom_hits})`,
      };
    default:
      return { seq, who: "system", text: `[${rec.type}]` };
  }
}

/**
 * Fold one stream record into the view. Records at or below lastSeq are
 * duplicates (reconnect replays) and are dropped, so a resumed stream can
 * never double-print transcript lines.
 */
export function applyRecord(view: ViewState, rec: TranscriptRecord): ViewState {
  if (rec.seq <= view.lastSeq) return view;
  const line = lineFor(rec);
  const next: ViewState = {
    lastSeq: rec.seq,
    lines: line ? [...view.lines, line] : view.lines,
    currentPrompt: view.currentPrompt,
    awaitingRating: view.awaitingRating,
    replayed: view.replayed,
    ended: view.ended,
  };
  if (rec.kind === "action") {
    if (rec.type === "say") {
      next.currentPrompt = rec.text ?? "";
      next.awaitingRating = false;
    } else if (rec.type === "request_rating") {
      next.currentPrompt = "(please rate it from 1 to 5)";
      next.awaitingRating = true;
    } else if (rec.type === "replay_stimuli") {
      next.replayed = rec.stimulus_ids ?? [];
    } else if (rec.type === "end_session") {
      next.ended = true;
    }
  } else if (rec.kind === "event" && rec.type === "rating_received") {
    next.awaitingRating = false;
  }
  return next;
}

export function applyRecords(view: ViewState, recs: TranscriptRecord[]): ViewState {
  return recs.reduce(applyRecord, view);
}

/** 1..5 integer scale; anything else is rejected client-side. */
export function validateRating(value: number): string | null {
  if (!Number.isInteger(value) || value < 1 || value > 5) {
    return "rating must be a whole number from 1 to 5";
  }
  return null;
}

/** Frames are streamed only while the engine is actually watching. */
export function isPerceivingPhase(phase: string): boolean {
  return phase === "playing_stimulus" || phase === "clarifying";
}

// --- plot model -----------------------------------------------------------

export interface ZoneRegion {
  zone: string;
  x0: number; // vision axis, [-1, 1]
  x1: number;
  y0: number; // language axis, [-1, 1]
  y1: number;
}

/**
 * The five shaded regions for the given thresholds. The neutral cross is
 * emitted last so it paints over the quadrant corners it cuts through.
 */
export function zoneRegions(thetaVision: number, thetaLanguage: number): ZoneRegion[] {
  const tv = thetaVision;
  const tl = thetaLanguage;
  return [
    { zone: "coherent_positive", x0: tv, x1: 1, y0: tl, y1: 1 },
    { zone: "coherent_negative", x0: -1, x1: -tv, y0: -1, y1: -tl },
    { zone: "mismatch_vision_pos_lang_neg", x0: tv, x1: 1, y0: -1, y1: -tl },
    { zone: "mismatch_vision_neg_lang_pos", x0: -1, x1: -tv, y0: tl, y1: 1 },
    { zone: "neutral", x0: -tv, x1: tv, y0: -1, y1: 1 },
    { zone: "neutral", x0: -1, x1: 1, y0: -tl, y1: tl },
  ];
}

export interface PlotMarker {
  stimulusId: string;
  category: string;
  initial: Scores;
  final: Scores;
  moved: boolean;
  resolved: boolean;
}

export interface PlotModel {
  regions: ZoneRegion[];
  markers: PlotMarker[];
  live: Scores | null;
}

function markerFor(record: CommittedRecord): PlotMarker {
  const moved =
    record.initial_scores.vision !== record.final_scores.vision ||
    record.initial_scores.language !== record.final_scores.language;
  return {
    stimulusId: record.stimulus_id,
    category: record.category,
    initial: record.initial_scores,
    final: record.final_scores,
    moved,
    resolved: record.resolved,
  };
}

/**
 * Markers are exactly the committed associations; the single live point is
 * the current stimulus's uncommitted reading while the engine is between
 * scoring and commit (awaiting the rating or clarifying).
 */
export function plotModel(snapshot: Snapshot): PlotModel {
  const live =
    snapshot.phase === "await_rating" || snapshot.phase === "clarifying"
      ? snapshot.initial_scores
      : null;
  return {
    regions: zoneRegions(snapshot.zone_config.theta_vision, snapshot.zone_config.theta_language),
    markers: snapshot.committed.map(markerFor),
    live,
  };
}

// --- progress -----------------------------------------------------------------

export interface Progress {
  label: string;
  index: number;
  total: number;
}

export function progressFor(snapshot: Snapshot): Progress {
  return {
    label: `${snapshot.current_stimulus.id} (${snapshot.current_index + 1} of ${snapshot.stimulus_count})`,
    index: snapshot.current_index,
    total: snapshot.stimulus_count,
  };
}
