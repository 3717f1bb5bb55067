"""Interaction state machine: stimulus -> reaction -> description -> rating,
with a bounded clarification loop on cross-modal mismatch.

The engine is event-sourced. ``start_session`` and ``advance`` are the only
ways the state moves; every event and every emitted action is appended to
an in-state transcript with gapless sequence numbers starting at 1, and
replaying the transcript's events through a fresh engine reproduces the
final state and memory exactly. ``advance`` raises ProtocolError (state
untouched) when an event is not legal for the current phase.

An association is committed to memory exactly once per stimulus: directly
when the initial reaction is coherent, otherwise after the clarification
loop ends, either because a reply classified coherent or because the
extension cap forced the commit (recorded as unresolved).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Sequence, Union

from .core import (
    ConsolidationParams,
    EmotionalScores,
    Modality,
    ZoneConfig,
    classify_zone,
    consolidate,
    is_coherent,
    language_score,
    most_extreme_modality,
    preference_score,
    vision_score,
)
from .errors import ConfigError, ContractError, ProtocolError
from .memory import AffectiveMemory, AssociationRecord
from .perception import (
    FaceFrame,
    ReactionAggregate,
    Utterance,
    aggregate_reaction,
    frame_from_dict,
    frame_to_dict,
)


class StimulusCategory(str, Enum):
    SONG = "song"
    NOISE = "noise"


class Phase(str, Enum):
    AWAIT_START = "await_start"
    PLAYING_STIMULUS = "playing_stimulus"
    AWAIT_DESCRIPTION = "await_description"
    AWAIT_RATING = "await_rating"
    CLARIFYING = "clarifying"
    PLAYBACK = "playback"
    AWAIT_FINAL_FEEDBACK = "await_final_feedback"
    DONE = "done"


@dataclass(frozen=True)
class StimulusRef:
    id: str
    category: StimulusCategory
    duration_ms: int = 17000

    def __post_init__(self) -> None:
        if not self.id:
            raise ConfigError("stimulus id must be non-empty")
        if self.duration_ms <= 0:
            raise ConfigError(f"stimulus {self.id!r} duration_ms must be positive")


@dataclass(frozen=True)
class PromptTemplates:
    """All fixed dialogue strings. Configurable; no text is generated."""

    greeting: str = (
        "Hello! I am going to play you some sounds. After each one, tell me how it made you feel."
    )
    describe: str = "How did that one make you feel?"
    follow_up: str = "I want to be sure I understand. Could you tell me a bit more about how it felt?"
    final_question: str = (
        "Of the ones I just replayed, how many were in your top picks, and how many in your bottom picks?"
    )
    hypothesis_vision_positive: str = (
        "It looked like you enjoyed that. Could you tell me more about how it made you feel?"
    )
    hypothesis_vision_negative: str = (
        "It looked like you did not enjoy that. Could you tell me more about how it made you feel?"
    )
    hypothesis_language_positive: str = (
        "You said you liked it. Could you tell me more about how it made you feel?"
    )
    hypothesis_language_negative: str = (
        "You said you did not like it. Could you tell me more about how it made you feel?"
    )


@dataclass(frozen=True)
class SessionConfig:
    stimuli: tuple[StimulusRef, ...]
    max_extensions: int = 5
    top_k: int = 3
    zone_config: ZoneConfig = ZoneConfig()
    consolidation: ConsolidationParams = ConsolidationParams()
    prompts: PromptTemplates = PromptTemplates()

    def __post_init__(self) -> None:
        object.__setattr__(self, "stimuli", tuple(self.stimuli))
        if not self.stimuli:
            raise ConfigError("stimuli list is empty")
        ids = [s.id for s in self.stimuli]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ConfigError(f"stimulus ids must be unique; duplicated: {dupes}")
        if self.max_extensions < 1:
            raise ConfigError(f"max_extensions must be >= 1, got {self.max_extensions}")
        if not 1 <= self.top_k <= len(self.stimuli):
            raise ConfigError(
                f"top_k must be in 1..{len(self.stimuli)} (stimulus count), got {self.top_k}"
            )

    def stimulus_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.stimuli)


# --- events ---------------------------------------------------------------


@dataclass(frozen=True)
class StartSession:
    subject_id: str


@dataclass(frozen=True)
class StimulusFinished:
    frames: tuple[FaceFrame, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "frames", tuple(self.frames))


@dataclass(frozen=True)
class UtteranceReceived:
    utterance: Utterance


@dataclass(frozen=True)
class RatingReceived:
    rating: int

    def __post_init__(self) -> None:
        if not 1 <= self.rating <= 5:
            raise ValueError(f"rating must be in 1..5, got {self.rating}")


@dataclass(frozen=True)
class PlaybackFinished:
    pass


@dataclass(frozen=True)
class FinalFeedback:
    top_hits: int
    bottom_hits: int

    def __post_init__(self) -> None:
        if self.top_hits < 0 or self.bottom_hits < 0:
            raise ValueError("feedback hit counts must be non-negative")


EngineEvent = Union[
    StartSession, StimulusFinished, UtteranceReceived, RatingReceived, PlaybackFinished, FinalFeedback
]


# --- actions --------------------------------------------------------------


@dataclass(frozen=True)
class PlayStimulus:
    stimulus_id: str


@dataclass(frozen=True)
class Say:
    text: str


@dataclass(frozen=True)
class RequestRating:
    pass


@dataclass(frozen=True)
class ReplayStimuli:
    stimulus_ids: tuple[str, ...]


@dataclass(frozen=True)
class EndSession:
    pass


EngineAction = Union[PlayStimulus, Say, RequestRating, ReplayStimuli, EndSession]


# --- transcript wire format ------------------------------------------------

_EVENT_TYPES = {
    StartSession: "start_session",
    StimulusFinished: "stimulus_finished",
    UtteranceReceived: "utterance_received",
    RatingReceived: "rating_received",
    PlaybackFinished: "playback_finished",
    FinalFeedback: "final_feedback",
}

_ACTION_TYPES = {
    PlayStimulus: "play_stimulus",
    Say: "say",
    RequestRating: "request_rating",
    ReplayStimuli: "replay_stimuli",
    EndSession: "end_session",
}


def encode_event(event: EngineEvent) -> dict:
    kind = _EVENT_TYPES[type(event)]
    if isinstance(event, StartSession):
        return {"type": kind, "subject_id": event.subject_id}
    if isinstance(event, StimulusFinished):
        return {"type": kind, "frames": [frame_to_dict(f) for f in event.frames]}
    if isinstance(event, UtteranceReceived):
        return {
            "type": kind,
            "text": event.utterance.text,
            "frames": [frame_to_dict(f) for f in event.utterance.synchronous_frames],
        }
    if isinstance(event, RatingReceived):
        return {"type": kind, "rating": event.rating}
    if isinstance(event, PlaybackFinished):
        return {"type": kind}
    return {"type": kind, "top_hits": event.top_hits, "bottom_hits": event.bottom_hits}


def decode_event(data: Mapping) -> EngineEvent:
    kind = data["type"]
    if kind == "start_session":
        return StartSession(subject_id=data["subject_id"])
    if kind == "stimulus_finished":
        return StimulusFinished(frames=tuple(frame_from_dict(f) for f in data.get("frames", ())))
    if kind == "utterance_received":
        return UtteranceReceived(
            Utterance(
                text=data["text"],
                synchronous_frames=tuple(frame_from_dict(f) for f in data.get("frames", ())),
            )
        )
    if kind == "rating_received":
        return RatingReceived(rating=data["rating"])
    if kind == "playback_finished":
        return PlaybackFinished()
    if kind == "final_feedback":
        return FinalFeedback(top_hits=data["top_hits"], bottom_hits=data["bottom_hits"])
    raise ValueError(f"unknown event type {kind!r}")


def encode_action(action: EngineAction) -> dict:
    kind = _ACTION_TYPES[type(action)]
    if isinstance(action, PlayStimulus):
        return {"type": kind, "stimulus_id": action.stimulus_id}
    if isinstance(action, Say):
        return {"type": kind, "text": action.text}
    if isinstance(action, ReplayStimuli):
        return {"type": kind, "stimulus_ids": list(action.stimulus_ids)}
    return {"type": kind}


# --- session state ----------------------------------------------------------


@dataclass
class SessionState:
    """Mutable position of one session. Mutated only by start_session/advance."""

    subject_id: str
    phase: Phase = Phase.AWAIT_START
    current_index: int = 0
    extension_count: int = 0
    vision_aggregate: ReactionAggregate | None = None
    initial_scores: EmotionalScores | None = None
    last_observation: EmotionalScores | None = None
    rating: int | None = None
    final_feedback: tuple[int, int] | None = None
    next_seq: int = 1
    transcript: list[dict] = field(default_factory=list)

    def _append(self, kind: str, payload: dict) -> None:
        self.transcript.append({"seq": self.next_seq, "kind": kind, **payload})
        self.next_seq += 1

    def log_event(self, event: EngineEvent) -> int:
        seq = self.next_seq
        self._append("event", encode_event(event))
        return seq

    def log_actions(self, actions: Sequence[EngineAction]) -> None:
        for action in actions:
            self._append("action", encode_action(action))


@dataclass(frozen=True)
class EngineDeps:
    """External capabilities the engine needs: a language backend and memory.

    ``language_valence`` maps an Utterance to the backend's raw [0, 1]
    valence (out-of-range values are clamped downstream).
    """

    language_valence: Callable[[Utterance], float]
    memory: AffectiveMemory


_EXPECTED_EVENTS: dict[Phase, tuple[str, ...]] = {
    Phase.AWAIT_START: (),
    Phase.PLAYING_STIMULUS: ("stimulus_finished",),
    Phase.AWAIT_DESCRIPTION: ("utterance_received",),
    Phase.AWAIT_RATING: ("rating_received",),
    Phase.CLARIFYING: ("utterance_received",),
    Phase.PLAYBACK: ("playback_finished",),
    Phase.AWAIT_FINAL_FEEDBACK: ("final_feedback",),
    Phase.DONE: (),
}


def expected_events(phase: Phase) -> tuple[str, ...]:
    return _EXPECTED_EVENTS[phase]


def render_hypothesis_prompt(
    scores: EmotionalScores,
    cfg: ZoneConfig | None = None,
    prompts: PromptTemplates | None = None,
) -> str:
    """The clarification opener: lead with the most extreme modality's reading.

    Raises ContractError when the scores are not in a mismatch zone.
    """
    cfg = cfg or ZoneConfig()
    prompts = prompts or PromptTemplates()
    if is_coherent(classify_zone(scores, cfg)):
        raise ContractError("hypothesis prompt requires mismatched scores")
    mem = most_extreme_modality(scores)
    if mem is Modality.VISION:
        return (
            prompts.hypothesis_vision_positive
            if scores.vision > 0
            else prompts.hypothesis_vision_negative
        )
    return (
        prompts.hypothesis_language_positive
        if scores.language > 0
        else prompts.hypothesis_language_negative
    )


def select_top_k(records: Sequence[AssociationRecord], k: int) -> list[str]:
    """Ids of the k highest-preference associations, ties kept in input order."""
    if len(records) < k:
        raise ValueError(f"need at least {k} committed associations, have {len(records)}")
    ranked = sorted(records, key=lambda r: -preference_score(r.final_scores))
    return [r.stimulus_id for r in ranked[:k]]


def start_session(subject_id: str, cfg: SessionConfig) -> tuple[SessionState, list[EngineAction]]:
    """Open a session: greet and start the first stimulus."""
    if not subject_id:
        raise ConfigError("subject_id must be non-empty")
    state = SessionState(subject_id=subject_id)
    state.log_event(StartSession(subject_id=subject_id))
    state.phase = Phase.PLAYING_STIMULUS
    state.current_index = 0
    actions: list[EngineAction] = [Say(cfg.prompts.greeting), PlayStimulus(cfg.stimuli[0].id)]
    state.log_actions(actions)
    return state, actions


def _reject(state: SessionState, event: EngineEvent) -> ProtocolError:
    got = _EVENT_TYPES[type(event)]
    expected = _EXPECTED_EVENTS[state.phase]
    hint = " or ".join(expected) if expected else "nothing"
    return ProtocolError(
        f"event {got!r} is not legal in phase {state.phase.value!r} (expected {hint})",
        expected=expected,
    )


def _commit_current(
    state: SessionState,
    cfg: SessionConfig,
    deps: EngineDeps,
    final_scores: EmotionalScores,
    resolved: bool,
    committed_at: int,
) -> list[EngineAction]:
    stimulus = cfg.stimuli[state.current_index]
    assert state.initial_scores is not None
    record = AssociationRecord(
        subject_id=state.subject_id,
        stimulus_id=stimulus.id,
        category=stimulus.category.value,
        initial_scores=state.initial_scores,
        final_scores=final_scores,
        zone_initial=classify_zone(state.initial_scores, cfg.zone_config),
        zone_final=classify_zone(final_scores, cfg.zone_config),
        extensions_used=state.extension_count,
        resolved=resolved,
        rating=state.rating,
        committed_at=committed_at,
    )
    deps.memory.commit(record)

    state.extension_count = 0
    state.rating = None
    state.vision_aggregate = None
    if state.current_index + 1 < len(cfg.stimuli):
        state.current_index += 1
        state.phase = Phase.PLAYING_STIMULUS
        return [PlayStimulus(cfg.stimuli[state.current_index].id)]
    top = select_top_k(deps.memory.query_subject(state.subject_id), cfg.top_k)
    state.phase = Phase.PLAYBACK
    return [ReplayStimuli(tuple(top))]


def advance(
    state: SessionState,
    event: EngineEvent,
    cfg: SessionConfig,
    deps: EngineDeps,
) -> tuple[SessionState, list[EngineAction]]:
    """Apply one event. Returns the (mutated) state and the emitted actions.

    Illegal (phase, event) pairs raise ProtocolError before anything is
    logged, so a rejected event leaves no trace in the transcript.
    """
    phase = state.phase
    actions: list[EngineAction]

    if phase is Phase.PLAYING_STIMULUS and isinstance(event, StimulusFinished):
        state.log_event(event)
        state.vision_aggregate = aggregate_reaction(event.frames)
        state.phase = Phase.AWAIT_DESCRIPTION
        actions = [Say(cfg.prompts.describe)]

    elif phase is Phase.AWAIT_DESCRIPTION and isinstance(event, UtteranceReceived):
        state.log_event(event)
        agg = state.vision_aggregate
        assert agg is not None  # set by the StimulusFinished transition
        state.initial_scores = EmotionalScores(
            vision=vision_score(agg.mean_valence, agg.mean_arousal),
            language=language_score(deps.language_valence(event.utterance)),
        )
        state.phase = Phase.AWAIT_RATING
        actions = [RequestRating()]

    elif phase is Phase.AWAIT_RATING and isinstance(event, RatingReceived):
        seq = state.log_event(event)
        state.rating = event.rating
        assert state.initial_scores is not None
        if is_coherent(classify_zone(state.initial_scores, cfg.zone_config)):
            actions = _commit_current(
                state, cfg, deps, final_scores=state.initial_scores, resolved=True, committed_at=seq
            )
        else:
            state.extension_count = 1
            state.phase = Phase.CLARIFYING
            actions = [
                Say(render_hypothesis_prompt(state.initial_scores, cfg.zone_config, cfg.prompts))
            ]

    elif phase is Phase.CLARIFYING and isinstance(event, UtteranceReceived):
        seq = state.log_event(event)
        agg = aggregate_reaction(event.utterance.synchronous_frames)
        observation = EmotionalScores(
            vision=vision_score(agg.mean_valence, agg.mean_arousal),
            language=language_score(deps.language_valence(event.utterance)),
        )
        state.last_observation = observation
        observation_coherent = is_coherent(classify_zone(observation, cfg.zone_config))
        if observation_coherent or state.extension_count == cfg.max_extensions:
            assert state.initial_scores is not None
            final = consolidate(
                state.initial_scores, observation, cfg.consolidation, cfg.zone_config
            )
            actions = _commit_current(
                state, cfg, deps, final_scores=final, resolved=observation_coherent, committed_at=seq
            )
        else:
            state.extension_count += 1
            assert state.extension_count <= cfg.max_extensions
            actions = [Say(cfg.prompts.follow_up)]

    elif phase is Phase.PLAYBACK and isinstance(event, PlaybackFinished):
        state.log_event(event)
        state.phase = Phase.AWAIT_FINAL_FEEDBACK
        actions = [Say(cfg.prompts.final_question)]

    elif phase is Phase.AWAIT_FINAL_FEEDBACK and isinstance(event, FinalFeedback):
        if event.top_hits > cfg.top_k or event.bottom_hits > cfg.top_k:
            raise ValueError(
                f"feedback hit counts must be <= top_k ({cfg.top_k}), "
                f"got top={event.top_hits} bottom={event.bottom_hits}"
            )
        state.log_event(event)
        state.final_feedback = (event.top_hits, event.bottom_hits)
        state.phase = Phase.DONE
        actions = [EndSession()]

    else:
        raise _reject(state, event)

    state.log_actions(actions)
    return state, actions


# --- transcript utilities ---------------------------------------------------


def transcript_jsonl(transcript: Sequence[Mapping]) -> str:
    """Line-delimited export: one event or action per line, in sequence order."""
    return "".join(
        json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n" for rec in transcript
    )


def transcript_digest(transcript: Sequence[Mapping]) -> str:
    return hashlib.sha256(transcript_jsonl(transcript).encode("utf-8")).hexdigest()


def session_snapshot(state: SessionState) -> dict:
    """JSON-able summary of everything that defines the session's position."""

    def scores(s: EmotionalScores | None) -> dict | None:
        return None if s is None else {"vision": s.vision, "language": s.language}

    return {
        "subject_id": state.subject_id,
        "phase": state.phase.value,
        "current_index": state.current_index,
        "extension_count": state.extension_count,
        "initial_scores": scores(state.initial_scores),
        "last_observation": scores(state.last_observation),
        "rating": state.rating,
        "final_feedback": list(state.final_feedback) if state.final_feedback else None,
        "next_seq": state.next_seq,
    }


def replay_transcript(
    transcript: Sequence[Mapping], cfg: SessionConfig, deps: EngineDeps
) -> tuple[SessionState, list[EngineAction]]:
    """Re-drive a fresh engine from a transcript's event records.

    Actions are regenerated, not read back, so a successful replay is also
    a determinism check: the resulting transcript must match the original.
    """
    state: SessionState | None = None
    last_actions: list[EngineAction] = []
    for record in transcript:
        if record.get("kind") != "event":
            continue
        event = decode_event(record)
        if isinstance(event, StartSession):
            if state is not None:
                raise ProtocolError("start_session appears twice in transcript")
            state, last_actions = start_session(event.subject_id, cfg)
        else:
            if state is None:
                raise ProtocolError("transcript does not begin with start_session")
            state, last_actions = advance(state, event, cfg, deps)
    if state is None:
        raise ProtocolError("transcript contains no events")
    return state, last_actions
