"""Scenario scripts: authored subjects that replace live humans in batch runs.

A scenario is one JSON document per subject holding, for every stimulus in
the session config, the initial reaction frames, the spoken description,
the 1..5 self-rating, and up to five clarification replies (text plus the
frames shown while speaking). Frames are authored either explicitly or via
the ``constant`` shorthand, which expands to n identical frames at the
3 Hz sampling cadence.

Loading is strict, and validation performs a dry run of the zone
classification so a script can never strand the engine mid-clarification:
if a stimulus's scripted opening mismatches, enough replies must be
authored to reach either a coherent reply or the extension cap.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import EmotionalScores, classify_zone, is_coherent, language_score, vision_score
from .engine import PromptTemplates, SessionConfig, StimulusCategory, StimulusRef
from .errors import ConfigError, MissingCueError, ScenarioValidationError
from .perception import FaceFrame, Lexicon, Utterance, aggregate_reaction, lexicon_valence

logger = logging.getLogger(__name__)

FRAME_INTERVAL_MS = 1000.0 / 3.0


@dataclass(frozen=True)
class StimulusScript:
    reaction_frames: tuple[FaceFrame, ...]
    description: str
    rating: int
    clarifications: tuple[Utterance, ...] = ()

    def __post_init__(self) -> None:
        if not self.description.strip():
            raise ScenarioValidationError("stimulus description is empty")
        if not 1 <= self.rating <= 5:
            raise ScenarioValidationError(f"rating must be in 1..5, got {self.rating}")


@dataclass(frozen=True)
class ScenarioScript:
    subject_id: str
    responses: Mapping[str, StimulusScript]
    ground_truth_ranking: tuple[str, ...]


def constant_frames(valence: float, arousal: float, n_frames: int) -> tuple[FaceFrame, ...]:
    """n identical frames at the nominal 3 Hz cadence."""
    return tuple(
        FaceFrame(timestamp_ms=round(i * FRAME_INTERVAL_MS), valence=valence, arousal=arousal)
        for i in range(n_frames)
    )


def _parse_frames(spec, where: str) -> tuple[FaceFrame, ...]:
    if isinstance(spec, Mapping) and "constant" in spec:
        c = spec["constant"]
        try:
            return constant_frames(c["valence"], c["arousal"], int(c["n"]))
        except (KeyError, TypeError) as exc:
            raise ScenarioValidationError(f"{where}: bad constant-frames shorthand: {exc}") from exc
    if not isinstance(spec, list):
        raise ScenarioValidationError(f"{where}: frames must be a list or a constant shorthand")
    frames = []
    for i, item in enumerate(spec):
        try:
            raw_v, raw_a = float(item["valence"]), float(item["arousal"])
            frame = FaceFrame(
                timestamp_ms=item["timestamp_ms"], valence=raw_v, arousal=raw_a
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioValidationError(f"{where}: frame {i}: {exc}") from exc
        if (frame.valence, frame.arousal) != (raw_v, raw_a):
            logger.warning("%s: frame %d values clamped into [-1, 1]", where, i)
        frames.append(frame)
    for earlier, later in zip(frames, frames[1:]):
        if later.timestamp_ms < earlier.timestamp_ms:
            raise ScenarioValidationError(f"{where}: frame timestamps must be non-decreasing")
    return tuple(frames)


def scenario_from_dict(data: Mapping, source: str = "<scenario>") -> ScenarioScript:
    try:
        subject_id = data["subject_id"]
        responses_raw = data["responses"]
        ranking = tuple(data["ground_truth_ranking"])
    except KeyError as exc:
        raise ScenarioValidationError(f"{source}: missing top-level field {exc}") from exc
    if not isinstance(subject_id, str) or not subject_id:
        raise ScenarioValidationError(f"{source}: subject_id must be a non-empty string")
    if len(set(ranking)) != len(ranking):
        raise ScenarioValidationError(f"{source}: ground_truth_ranking contains duplicates")

    responses: dict[str, StimulusScript] = {}
    for stimulus_id, item in responses_raw.items():
        where = f"{source}: stimulus {stimulus_id!r}"
        try:
            description = item["description"]
            rating = item["rating"]
        except KeyError as exc:
            raise ScenarioValidationError(f"{where}: missing field {exc}") from exc
        clarifications = []
        for j, reply in enumerate(item.get("clarifications", [])):
            reply_where = f"{where} clarification {j + 1}"
            try:
                text = reply["text"]
            except KeyError as exc:
                raise ScenarioValidationError(f"{reply_where}: missing field {exc}") from exc
            frames = _parse_frames(reply.get("frames", []), reply_where)
            try:
                clarifications.append(Utterance(text=text, synchronous_frames=frames))
            except ValueError as exc:
                raise ScenarioValidationError(f"{reply_where}: {exc}") from exc
        responses[stimulus_id] = StimulusScript(
            reaction_frames=_parse_frames(item.get("reaction_frames", []), where),
            description=description,
            rating=rating,
            clarifications=tuple(clarifications),
        )
    return ScenarioScript(
        subject_id=subject_id, responses=responses, ground_truth_ranking=ranking
    )


def load_scenario(path) -> ScenarioScript:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioValidationError(
                f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
    return scenario_from_dict(data, source=str(path))


# --- scripted perception backends -------------------------------------------


def scripted_vision(script: ScenarioScript, stimulus_id: str) -> tuple[FaceFrame, ...]:
    """The authored initial-reaction frames for a stimulus, verbatim."""
    try:
        return script.responses[stimulus_id].reaction_frames
    except KeyError:
        raise MissingCueError(
            f"script for {script.subject_id!r} has no stimulus {stimulus_id!r}"
        ) from None


def scripted_utterance(script: ScenarioScript, stimulus_id: str, index: int) -> Utterance:
    """Authored utterance: index 0 is the description, 1..n the clarification replies."""
    try:
        entry = script.responses[stimulus_id]
    except KeyError:
        raise MissingCueError(
            f"script for {script.subject_id!r} has no stimulus {stimulus_id!r}"
        ) from None
    if index == 0:
        return Utterance(text=entry.description)
    if 1 <= index <= len(entry.clarifications):
        return entry.clarifications[index - 1]
    raise MissingCueError(
        f"script for {script.subject_id!r}, stimulus {stimulus_id!r}: "
        f"no clarification reply {index} (authored: {len(entry.clarifications)})"
    )


def _scores_for(frames: Sequence[FaceFrame], utterance: Utterance, lexicon: Lexicon) -> EmotionalScores:
    agg = aggregate_reaction(frames)
    return EmotionalScores(
        vision=vision_score(agg.mean_valence, agg.mean_arousal),
        language=language_score(lexicon_valence(utterance, lexicon)),
    )


def validate_script(script: ScenarioScript, cfg: SessionConfig, lexicon: Lexicon) -> None:
    """Check a script against a config before any engine runs.

    Raises ScenarioValidationError when stimulus ids do not line up, the
    ground-truth ranking is not a permutation of them, or the dry-run
    classification shows the engine would request a clarification reply
    the script does not author.
    """
    config_ids = set(cfg.stimulus_ids())
    script_ids = set(script.responses)
    problems: list[str] = []
    if missing := sorted(config_ids - script_ids):
        problems.append(f"script authors no responses for stimuli: {missing}")
    if extra := sorted(script_ids - config_ids):
        problems.append(f"script authors unknown stimuli: {extra}")
    if set(script.ground_truth_ranking) != config_ids or len(
        script.ground_truth_ranking
    ) != len(config_ids):
        problems.append("ground_truth_ranking is not a permutation of the config's stimulus ids")

    for stimulus_id in cfg.stimulus_ids():
        entry = script.responses.get(stimulus_id)
        if entry is None:
            continue
        initial = _scores_for(
            entry.reaction_frames, Utterance(text=entry.description), lexicon
        )
        if is_coherent(classify_zone(initial, cfg.zone_config)):
            continue
        # Walk replies exactly as the engine would.
        for k in range(1, cfg.max_extensions + 1):
            if k > len(entry.clarifications):
                problems.append(
                    f"stimulus {stimulus_id!r} mismatches and needs clarification reply {k}, "
                    f"but only {len(entry.clarifications)} are authored"
                )
                break
            observation = _scores_for(
                entry.clarifications[k - 1].synchronous_frames,
                entry.clarifications[k - 1],
                lexicon,
            )
            if is_coherent(classify_zone(observation, cfg.zone_config)):
                break
    if problems:
        raise ScenarioValidationError("; ".join(problems))


# --- session config files ----------------------------------------------------


def default_stimuli() -> tuple[StimulusRef, ...]:
    """The built-in nine-stimulus set: five songs and four irritant noises."""
    songs = ("bright_anthem", "slow_ballad", "jazz_groove", "synth_pop", "folk_tune")
    noises = ("fork_scrape", "loud_chewing", "static_burst", "alarm_buzz")
    return tuple(
        [StimulusRef(id=s, category=StimulusCategory.SONG) for s in songs]
        + [StimulusRef(id=n, category=StimulusCategory.NOISE) for n in noises]
    )


def default_session_config() -> SessionConfig:
    return SessionConfig(stimuli=default_stimuli())


def session_config_from_dict(data: Mapping, source: str = "<config>") -> SessionConfig:
    from .core import ConsolidationParams, ZoneConfig

    try:
        stimuli = tuple(
            StimulusRef(
                id=item["id"],
                category=StimulusCategory(item["category"]),
                duration_ms=item.get("duration_ms", 17000),
            )
            for item in data["stimuli"]
        )
    except KeyError as exc:
        raise ConfigError(f"{source}: stimulus entry missing field {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    kwargs: dict = {"stimuli": stimuli}
    if "max_extensions" in data:
        kwargs["max_extensions"] = data["max_extensions"]
    if "top_k" in data:
        kwargs["top_k"] = data["top_k"]
    if "zone_config" in data:
        try:
            kwargs["zone_config"] = ZoneConfig(**data["zone_config"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{source}: zone_config: {exc}") from exc
    if "consolidation" in data:
        try:
            kwargs["consolidation"] = ConsolidationParams(**data["consolidation"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{source}: consolidation: {exc}") from exc
    if "prompts" in data:
        try:
            kwargs["prompts"] = PromptTemplates(**data["prompts"])
        except TypeError as exc:
            raise ConfigError(f"{source}: prompts: {exc}") from exc
    return SessionConfig(**kwargs)


def load_session_config(path) -> SessionConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
    return session_config_from_dict(data, source=str(path))
