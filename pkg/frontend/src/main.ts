// DOM wiring for the live session client.
//
// All engine state shown here comes from the service: transcript lines from
// the SSE stream, numbers (scores, zones, phase, committed markers) from
// state snapshots. The page keeps the session id in the URL hash, so a hard
// refresh reattaches to the same session and rebuilds an identical view by
// replaying the stream from sequence 0.

import { ApiError, SessionApi } from "./api.js";
import { FrameSampler } from "./frames.js";
import {
  applyRecord,
  initialView,
  isPerceivingPhase,
  plotModel,
  progressFor,
  validateRating,
  type ViewState,
} from "./model.js";
import { renderPlot } from "./plot.js";
import { TranscriptStream } from "./stream.js";
import type { Snapshot } from "./types.js";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const els = {
  setup: byId<HTMLElement>("setup"),
  apiBase: byId<HTMLInputElement>("api-base"),
  subject: byId<HTMLInputElement>("subject-name"),
  startButton: byId<HTMLButtonElement>("start-button"),
  errorBanner: byId<HTMLElement>("error-banner"),
  errorText: byId<HTMLElement>("error-text"),
  retryButton: byId<HTMLButtonElement>("retry-button"),
  session: byId<HTMLElement>("session"),
  phaseBadge: byId<HTMLElement>("phase-badge"),
  connBadge: byId<HTMLElement>("conn-badge"),
  progress: byId<HTMLElement>("progress"),
  countdown: byId<HTMLElement>("countdown"),
  transcript: byId<HTMLUListElement>("transcript"),
  prompt: byId<HTMLElement>("current-prompt"),
  utterance: byId<HTMLInputElement>("utterance-input"),
  sayButton: byId<HTMLButtonElement>("say-button"),
  ratingRow: byId<HTMLElement>("rating-row"),
  ratingInput: byId<HTMLInputElement>("rating-input"),
  ratingSend: byId<HTMLButtonElement>("rating-send"),
  ratingError: byId<HTMLElement>("rating-error"),
  valence: byId<HTMLInputElement>("valence-slider"),
  arousal: byId<HTMLInputElement>("arousal-slider"),
  valenceOut: byId<HTMLElement>("valence-value"),
  arousalOut: byId<HTMLElement>("arousal-value"),
  plot: byId<HTMLElement>("plot") as unknown as SVGSVGElement,
  finalList: byId<HTMLElement>("final-list"),
  zoneNote: byId<HTMLElement>("zone-note"),
};

let api = new SessionApi("");
let sessionId: string | null = null;
let view: ViewState = initialView();
let snapshot: Snapshot | null = null;
let stream: TranscriptStream | null = null;
let sampler: FrameSampler | null = null;
let countdownTimer: ReturnType<typeof setInterval> | null = null;
let countdownFor = -1;
let refreshQueued = false;

function showError(message: string): void {
  els.errorText.textContent = message;
  els.errorBanner.hidden = false;
}

function clearError(): void {
  els.errorBanner.hidden = true;
}

function describeError(error: unknown): string {
  if (error instanceof ApiError) return `service error ${error.status}: ${JSON.stringify(error.detail)}`;
  return `service unreachable (${String(error)})`;
}

function hashState(): { session: string | null; base: string } {
  const params = new URLSearchParams(location.hash.replace(/^#/, ""));
  return { session: params.get("s"), base: params.get("api") ?? "" };
}

function writeHash(): void {
  if (!sessionId) return;
  const params = new URLSearchParams();
  params.set("s", sessionId);
  if (api.base) params.set("api", api.base);
  location.hash = params.toString();
}

// --- rendering -------------------------------------------------------------------

function renderTranscript(): void {
  els.transcript.replaceChildren(
    ...view.lines.map((line) => {
      const item = document.createElement("li");
      item.className = `line line-${line.who}`;
      item.textContent = line.text;
      return item;
    }),
  );
  els.transcript.scrollTop = els.transcript.scrollHeight;
  els.prompt.textContent = view.currentPrompt ?? "";
  els.ratingRow.hidden = !view.awaitingRating;
  if (view.replayed && view.ended) {
    els.finalList.hidden = false;
    els.finalList.textContent = `favourite picks: ${view.replayed.join(", ")}`;
  }
}

function renderSnapshot(): void {
  if (!snapshot) return;
  els.phaseBadge.textContent = snapshot.phase.replace(/_/g, " ");
  els.phaseBadge.dataset.phase = snapshot.phase;
  const progress = progressFor(snapshot);
  els.progress.textContent = snapshot.done ? "session complete" : progress.label;
  els.zoneNote.textContent =
    `neutral cross: vision +-${snapshot.zone_config.theta_vision}, ` +
    `language +-${snapshot.zone_config.theta_language}`;
  renderPlot(els.plot, plotModel(snapshot));
  sampler?.setPhase(snapshot.phase);
  syncCountdown();
  if (snapshot.done) stopCountdown();
}

function queueSnapshotRefresh(): void {
  if (refreshQueued || !sessionId) return;
  refreshQueued = true;
  setTimeout(async () => {
    refreshQueued = false;
    if (!sessionId) return;
    try {
      snapshot = await api.getState(sessionId);
      renderSnapshot();
    } catch (error) {
      showError(describeError(error));
    }
  }, 120);
}

// --- countdown: stimulus "playback" is a client-side timer -------------------------

function syncCountdown(): void {
  if (!snapshot || snapshot.phase !== "playing_stimulus") {
    stopCountdown();
    return;
  }
  if (countdownFor === snapshot.current_index && countdownTimer !== null) return;
  stopCountdown();
  countdownFor = snapshot.current_index;
  const duration = snapshot.current_stimulus.duration_ms;
  const startedAt = Date.now();
  els.countdown.hidden = false;
  countdownTimer = setInterval(() => {
    const remaining = duration - (Date.now() - startedAt);
    if (remaining > 0) {
      els.countdown.textContent = `${(remaining / 1000).toFixed(1)} s`;
      return;
    }
    stopCountdown();
    void finishStimulus();
  }, 100);
}

function stopCountdown(): void {
  if (countdownTimer !== null) clearInterval(countdownTimer);
  countdownTimer = null;
  els.countdown.hidden = true;
}

async function finishStimulus(): Promise<void> {
  if (!sessionId) return;
  await sampler?.flush();
  try {
    const result = await api.postEvent(sessionId, { type: "stimulus_finished" });
    snapshot = result.state;
    renderSnapshot();
  } catch (error) {
    if (!(error instanceof ApiError && error.status === 409)) showError(describeError(error));
  }
}

// --- user actions ----------------------------------------------------------------

async function submitUtterance(): Promise<void> {
  const text = els.utterance.value.trim();
  if (!text || !sessionId) return;
  await sampler?.flush(); // clarifying frames ride the service-side buffer
  try {
    const result = await api.postEvent(sessionId, { type: "utterance_received", text });
    els.utterance.value = "";
    snapshot = result.state;
    renderSnapshot();
    clearError();
  } catch (error) {
    showError(describeError(error));
  }
}

async function submitRating(): Promise<void> {
  if (!sessionId) return;
  const value = Number(els.ratingInput.value);
  const problem = validateRating(value);
  if (problem) {
    els.ratingError.textContent = problem;
    return;
  }
  els.ratingError.textContent = "";
  try {
    const result = await api.postEvent(sessionId, { type: "rating_received", rating: value });
    snapshot = result.state;
    renderSnapshot();
  } catch (error) {
    showError(describeError(error));
  }
}

async function maybeFinishPlayback(): Promise<void> {
  if (!sessionId || !snapshot) return;
  if (snapshot.phase === "playback") {
    const result = await api.postEvent(sessionId, { type: "playback_finished" });
    snapshot = result.state;
    renderSnapshot();
  }
}

// --- session lifecycle ---------------------------------------------------------------

function attach(id: string): void {
  sessionId = id;
  els.setup.hidden = true;
  els.session.hidden = false;
  view = initialView();

  sampler = new FrameSampler({
    post: (frames) => api.postFrames(id, frames),
    onError: (error) => showError(`frame upload failed twice: ${describeError(error)}`),
  });
  sampler.setSliders(Number(els.valence.value), Number(els.arousal.value));

  stream = new TranscriptStream(
    (fromSeq) => api.streamUrl(id, fromSeq),
    {
      onRecord: (rec) => {
        view = applyRecord(view, rec);
        renderTranscript();
        queueSnapshotRefresh();
      },
      onEnd: () => {
        els.connBadge.textContent = "stream ended";
        queueSnapshotRefresh();
      },
      onStatus: (status) => {
        els.connBadge.textContent = status;
      },
    },
  );
  stream.start(0);

  void api
    .getState(id)
    .then((s) => {
      snapshot = s;
      renderSnapshot();
      clearError();
    })
    .catch((error) => showError(describeError(error)));
}

async function startSession(): Promise<void> {
  api = new SessionApi(els.apiBase.value.trim().replace(/\/$/, ""));
  const subject = els.subject.value.trim() || "anonymous";
  try {
    const created = await api.createSession(subject);
    clearError();
    sessionId = created.session_id;
    writeHash();
    attach(created.session_id);
    snapshot = created.state;
    renderSnapshot();
  } catch (error) {
    showError(describeError(error));
  }
}

function wire(): void {
  els.startButton.addEventListener("click", () => void startSession());
  els.retryButton.addEventListener("click", () => {
    clearError();
    if (sessionId) attach(sessionId);
    else void startSession();
  });
  els.sayButton.addEventListener("click", () => void submitUtterance());
  els.utterance.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") void submitUtterance();
  });
  els.ratingSend.addEventListener("click", () => void submitRating());
  for (const slider of [els.valence, els.arousal]) {
    slider.addEventListener("input", () => {
      els.valenceOut.textContent = Number(els.valence.value).toFixed(2);
      els.arousalOut.textContent = Number(els.arousal.value).toFixed(2);
      sampler?.setSliders(Number(els.valence.value), Number(els.arousal.value));
    });
  }
  els.transcript.addEventListener("click", () => void maybeFinishPlayback());
  setInterval(() => void maybeFinishPlayback(), 1500);

  const { session, base } = hashState();
  if (base) els.apiBase.value = base;
  if (session) {
    api = new SessionApi(base);
    attach(session);
  }
}

wire();
