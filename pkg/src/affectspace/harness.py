"""Batch scenario runner, run metrics, and the CSV/report exports.

``run_scenario`` drives the dialogue engine with events synthesized from a
scenario script in protocol order and is fully deterministic: the same
script and config produce byte-identical transcripts and memory files on
every run. The harness owns the ground-truth rankings; the engine never
sees them.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    EmotionalScores,
    Modality,
    Zone,
    classify_zone,
    is_mismatch,
    most_extreme_modality,
    preference_score,
)
from .engine import (
    EngineDeps,
    FinalFeedback,
    Phase,
    PlaybackFinished,
    RatingReceived,
    ReplayStimuli,
    Say,
    SessionConfig,
    SessionState,
    StimulusFinished,
    UtteranceReceived,
    advance,
    start_session,
)
from .errors import EmptyMemoryError, ScenarioValidationError
from .memory import AffectiveMemory
from .perception import Lexicon, default_lexicon, lexicon_valence
from .scenario import ScenarioScript, scripted_utterance, scripted_vision, validate_script

CSV_HEADER = (
    "subject,stimulus,category,sv_initial,sl_initial,sv_final,sl_final,"
    "zone_initial,zone_final,extensions,resolved,rating"
)


@dataclass(frozen=True)
class StimulusOutcome:
    """Per-stimulus detail the committed record alone cannot carry."""

    stimulus_id: str
    zone_initial: Zone
    extensions_used: int
    resolved: bool
    hypothesis_prompt: str | None
    initial_mem: Modality | None
    observation: EmotionalScores | None
    observation_zone: Zone | None
    observation_mem: Modality | None
    hypothesis_confirmed: bool | None


@dataclass(frozen=True)
class RunMetrics:
    subject_id: str
    extension_counts: dict[str, int]
    mismatch_count: int
    resolved_mismatch_count: int
    top_k: int
    top_k_hits: int
    bottom_k_contamination: int
    preference_sum_by_category: dict[str, float]
    stimulus_count_by_category: dict[str, int]

    @property
    def stimulus_count(self) -> int:
        return len(self.extension_counts)

    @property
    def total_extensions(self) -> int:
        return sum(self.extension_counts.values())

    @property
    def mismatch_rate(self) -> float:
        return self.mismatch_count / self.stimulus_count if self.stimulus_count else 0.0

    @property
    def resolution_rate(self) -> float:
        # Vacuously resolved when nothing mismatched.
        if self.mismatch_count == 0:
            return 1.0
        return self.resolved_mismatch_count / self.mismatch_count

    @property
    def top_k_hit_rate(self) -> float:
        return self.top_k_hits / self.top_k


@dataclass
class RunResult:
    state: SessionState
    memory: AffectiveMemory
    metrics: RunMetrics
    outcomes: list[StimulusOutcome] = field(default_factory=list)

    @property
    def transcript(self) -> list[dict]:
        return self.state.transcript


def run_scenario(
    script: ScenarioScript, cfg: SessionConfig, lexicon: Lexicon | None = None
) -> RunResult:
    """Execute one scripted subject end to end and compute its metrics."""
    lexicon = lexicon or default_lexicon()
    validate_script(script, cfg, lexicon)

    memory = AffectiveMemory()
    deps = EngineDeps(
        language_valence=lambda utt: lexicon_valence(utt, lexicon), memory=memory
    )
    state, _ = start_session(script.subject_id, cfg)

    outcomes: list[StimulusOutcome] = []
    replayed: tuple[str, ...] = ()
    pending_prompt: str | None = None

    while state.phase is not Phase.DONE:
        stimulus_id = cfg.stimuli[state.current_index].id
        if state.phase is Phase.PLAYING_STIMULUS:
            event = StimulusFinished(frames=scripted_vision(script, stimulus_id))
        elif state.phase is Phase.AWAIT_DESCRIPTION:
            event = UtteranceReceived(scripted_utterance(script, stimulus_id, 0))
        elif state.phase is Phase.AWAIT_RATING:
            event = RatingReceived(rating=script.responses[stimulus_id].rating)
        elif state.phase is Phase.CLARIFYING:
            event = UtteranceReceived(
                scripted_utterance(script, stimulus_id, state.extension_count)
            )
        elif state.phase is Phase.PLAYBACK:
            event = PlaybackFinished()
        else:  # AWAIT_FINAL_FEEDBACK
            truth = script.ground_truth_ranking
            top_truth = set(truth[: cfg.top_k])
            bottom_truth = set(truth[-cfg.top_k :])
            event = FinalFeedback(
                top_hits=len(top_truth.intersection(replayed)),
                bottom_hits=len(bottom_truth.intersection(replayed)),
            )

        before = state.initial_scores
        state, actions = advance(state, event, cfg, deps)

        for action in actions:
            if isinstance(action, ReplayStimuli):
                replayed = action.stimulus_ids
            if isinstance(action, Say) and state.phase is Phase.CLARIFYING and state.extension_count == 1:
                pending_prompt = action.text

        record = memory.get(script.subject_id, stimulus_id)
        if record is not None and all(o.stimulus_id != stimulus_id for o in outcomes):
            if record.extensions_used > 0:
                observation = state.last_observation
                assert observation is not None and before is not None
                obs_zone = classify_zone(observation, cfg.zone_config)
                obs_mem = most_extreme_modality(observation)
                initial_mem = most_extreme_modality(record.initial_scores)
                confirmed = None if obs_zone is Zone.NEUTRAL else obs_mem is initial_mem
                outcomes.append(
                    StimulusOutcome(
                        stimulus_id=stimulus_id,
                        zone_initial=record.zone_initial,
                        extensions_used=record.extensions_used,
                        resolved=record.resolved,
                        hypothesis_prompt=pending_prompt,
                        initial_mem=initial_mem,
                        observation=observation,
                        observation_zone=obs_zone,
                        observation_mem=obs_mem,
                        hypothesis_confirmed=confirmed,
                    )
                )
            else:
                outcomes.append(
                    StimulusOutcome(
                        stimulus_id=stimulus_id,
                        zone_initial=record.zone_initial,
                        extensions_used=0,
                        resolved=True,
                        hypothesis_prompt=None,
                        initial_mem=None,
                        observation=None,
                        observation_zone=None,
                        observation_mem=None,
                        hypothesis_confirmed=None,
                    )
                )
            pending_prompt = None

    metrics = _metrics_for(script, cfg, memory, replayed)
    return RunResult(state=state, memory=memory, metrics=metrics, outcomes=outcomes)


def _metrics_for(
    script: ScenarioScript,
    cfg: SessionConfig,
    memory: AffectiveMemory,
    replayed: Sequence[str],
) -> RunMetrics:
    records = memory.query_subject(script.subject_id)
    extension_counts = {r.stimulus_id: r.extensions_used for r in records}
    mismatches = [r for r in records if is_mismatch(r.zone_initial)]

    truth = script.ground_truth_ranking
    top_truth = set(truth[: cfg.top_k])
    bottom_truth = set(truth[-cfg.top_k :])

    pref_sum: dict[str, float] = {}
    count: dict[str, int] = {}
    for r in records:
        pref_sum[r.category] = pref_sum.get(r.category, 0.0) + preference_score(r.final_scores)
        count[r.category] = count.get(r.category, 0) + 1

    return RunMetrics(
        subject_id=script.subject_id,
        extension_counts=extension_counts,
        mismatch_count=len(mismatches),
        resolved_mismatch_count=sum(1 for r in mismatches if r.resolved),
        top_k=cfg.top_k,
        top_k_hits=len(top_truth.intersection(replayed)),
        bottom_k_contamination=len(bottom_truth.intersection(replayed)),
        preference_sum_by_category=pref_sum,
        stimulus_count_by_category=count,
    )


# --- exports -----------------------------------------------------------------


def _fmt(value: float) -> str:
    return format(value, ".6g")


def export_space_csv(memory: AffectiveMemory, destination) -> None:
    """Write the association-space CSV: one row per committed record.

    Rows are ordered by subject then commit order; scores carry six
    significant digits. An empty memory is an error and creates no file.
    """
    if len(memory) == 0:
        raise EmptyMemoryError("memory holds no records; nothing to export")
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER.split(","))
        for r in memory.all_records():
            writer.writerow(
                [
                    r.subject_id,
                    r.stimulus_id,
                    r.category,
                    _fmt(r.initial_scores.vision),
                    _fmt(r.initial_scores.language),
                    _fmt(r.final_scores.vision),
                    _fmt(r.final_scores.language),
                    r.zone_initial.value,
                    r.zone_final.value,
                    r.extensions_used,
                    "true" if r.resolved else "false",
                    "" if r.rating is None else r.rating,
                ]
            )


@dataclass(frozen=True)
class SummaryReport:
    run_count: int
    stimulus_count: int
    mean_extensions: float
    max_extensions: int
    mismatch_count: int
    resolution_rate: float
    mean_top_k_hit_rate: float
    mean_preference_by_category: dict[str, float]

    def to_text(self) -> str:
        lines = [
            f"runs: {self.run_count}",
            f"stimuli presented: {self.stimulus_count}",
            f"mean extensions per stimulus: {self.mean_extensions:.4f}",
            f"max extensions for one stimulus: {self.max_extensions}",
            f"mismatched initial reactions: {self.mismatch_count}",
            f"resolution rate: {self.resolution_rate:.4f}",
            f"mean top-k hit rate: {self.mean_top_k_hit_rate:.4f}",
        ]
        for category in sorted(self.mean_preference_by_category):
            lines.append(
                f"mean preference ({category}): "
                f"{self.mean_preference_by_category[category]:.4f}"
            )
        return "\n".join(lines) + "\n"

    def to_csv_rows(self) -> list[list[str]]:
        rows = [
            ["metric", "value"],
            ["runs", str(self.run_count)],
            ["stimuli_presented", str(self.stimulus_count)],
            ["mean_extensions", _fmt(self.mean_extensions)],
            ["max_extensions", str(self.max_extensions)],
            ["mismatch_count", str(self.mismatch_count)],
            ["resolution_rate", _fmt(self.resolution_rate)],
            ["mean_top_k_hit_rate", _fmt(self.mean_top_k_hit_rate)],
        ]
        for category in sorted(self.mean_preference_by_category):
            rows.append(
                [f"mean_preference_{category}", _fmt(self.mean_preference_by_category[category])]
            )
        return rows


def summarize_runs(metrics: Sequence[RunMetrics]) -> SummaryReport:
    """Aggregate run metrics; raises on an empty list."""
    if not metrics:
        raise ScenarioValidationError("cannot summarize zero runs")
    stimulus_count = sum(m.stimulus_count for m in metrics)
    total_extensions = sum(m.total_extensions for m in metrics)
    mismatches = sum(m.mismatch_count for m in metrics)
    resolved = sum(m.resolved_mismatch_count for m in metrics)

    pref_sum: dict[str, float] = {}
    count: dict[str, int] = {}
    for m in metrics:
        for category, total in m.preference_sum_by_category.items():
            pref_sum[category] = pref_sum.get(category, 0.0) + total
            count[category] = count.get(category, 0) + m.stimulus_count_by_category[category]

    return SummaryReport(
        run_count=len(metrics),
        stimulus_count=stimulus_count,
        mean_extensions=total_extensions / stimulus_count if stimulus_count else 0.0,
        max_extensions=max(
            (max(m.extension_counts.values(), default=0) for m in metrics), default=0
        ),
        mismatch_count=mismatches,
        resolution_rate=resolved / mismatches if mismatches else 1.0,
        mean_top_k_hit_rate=sum(m.top_k_hit_rate for m in metrics) / len(metrics),
        mean_preference_by_category={c: pref_sum[c] / count[c] for c in pref_sum},
    )


# --- suite coverage ------------------------------------------------------------

COVERAGE_REQUIREMENTS = (
    "zone:coherent_positive",
    "zone:coherent_negative",
    "zone:neutral",
    "zone:mismatch_vision_pos_lang_neg",
    "zone:mismatch_vision_neg_lang_pos",
    "mem:vision",
    "mem:language",
    "hypothesis:confirmed",
    "hypothesis:disconfirmed",
    "observation:neutral_blend",
    "commit:forced_unresolved",
)


def coverage_labels(results: Sequence[RunResult]) -> set[str]:
    seen: set[str] = set()
    for result in results:
        for outcome in result.outcomes:
            seen.add(f"zone:{outcome.zone_initial.value}")
            if outcome.initial_mem is not None:
                seen.add(f"mem:{outcome.initial_mem.value}")
            if outcome.hypothesis_confirmed is True:
                seen.add("hypothesis:confirmed")
            if outcome.hypothesis_confirmed is False:
                seen.add("hypothesis:disconfirmed")
            if outcome.observation_zone is Zone.NEUTRAL:
                seen.add("observation:neutral_blend")
            if not outcome.resolved:
                seen.add("commit:forced_unresolved")
    return seen


def check_suite_coverage(results: Sequence[RunResult]) -> list[str]:
    """Behaviours the suite was supposed to exercise but did not."""
    seen = coverage_labels(results)
    return [req for req in COVERAGE_REQUIREMENTS if req not in seen]
