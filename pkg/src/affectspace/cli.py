"""Command-line surface: batch runs, suite runs, CSV export, a terminal
session for development, and the HTTP service launcher.

All file I/O is explicit through flags. Exit code 0 on success; failures
print a single ``ErrorClass: message`` line to stderr and exit 1. The only
environment variable consulted is NO_COLOR.
"""

from __future__ import annotations

import csv
import functools
import json
import os
import sys
from pathlib import Path

import click

from .core import classify_zone
from .engine import (
    EngineDeps,
    FinalFeedback,
    Phase,
    PlaybackFinished,
    PlayStimulus,
    RatingReceived,
    ReplayStimuli,
    RequestRating,
    Say,
    StimulusFinished,
    UtteranceReceived,
    advance,
    session_snapshot,
    start_session,
    transcript_digest,
    transcript_jsonl,
)
from .errors import AffectError, ScenarioValidationError
from .harness import check_suite_coverage, export_space_csv, run_scenario, summarize_runs
from .memory import AffectiveMemory, load_memory
from .perception import Utterance, default_lexicon, lexicon_valence, load_lexicon
from .scenario import (
    constant_frames,
    default_session_config,
    load_scenario,
    load_session_config,
)


def _styled(text: str, **kwargs) -> str:
    if os.environ.get("NO_COLOR"):
        return text
    return click.style(text, **kwargs)


def _cli_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except AffectError as exc:
            click.echo(f"{type(exc).__name__}: {exc}", err=True)
            sys.exit(1)

    return wrapper


@click.group()
def main() -> None:
    """Affective-association engine: scenario runs, exports, live service."""


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True), default=None)
@_cli_errors
def run(scenario_path, config_path, out_dir, lexicon_path) -> None:
    """Run one scripted subject end to end."""
    cfg = load_session_config(config_path) if config_path else default_session_config()
    lexicon = load_lexicon(lexicon_path) if lexicon_path else default_lexicon()
    script = load_scenario(scenario_path)

    result = run_scenario(script, cfg, lexicon)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{script.subject_id}.transcript.jsonl").write_text(
        transcript_jsonl(result.transcript), encoding="utf-8"
    )
    result.memory.save(out / f"{script.subject_id}.memory.json")
    metrics = result.metrics
    (out / f"{script.subject_id}.metrics.json").write_text(
        json.dumps(
            {
                "subject_id": metrics.subject_id,
                "extension_counts": metrics.extension_counts,
                "mismatch_count": metrics.mismatch_count,
                "mismatch_rate": metrics.mismatch_rate,
                "resolution_rate": metrics.resolution_rate,
                "top_k_hits": metrics.top_k_hits,
                "bottom_k_contamination": metrics.bottom_k_contamination,
                "transcript_digest": transcript_digest(result.transcript),
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    click.echo(
        f"{script.subject_id}: {metrics.stimulus_count} stimuli, "
        f"{metrics.mismatch_count} mismatches, {metrics.total_extensions} extensions, "
        f"top-{metrics.top_k} hits {metrics.top_k_hits}"
    )


@main.command()
@click.option("--dir", "suite_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True), default=None)
@_cli_errors
def suite(suite_dir, out_dir, lexicon_path) -> None:
    """Run every *.scenario.json in a directory against its config.json."""
    suite_path = Path(suite_dir)
    config_file = suite_path / "config.json"
    cfg = load_session_config(config_file) if config_file.exists() else default_session_config()
    lexicon = load_lexicon(lexicon_path) if lexicon_path else default_lexicon()

    scenario_files = sorted(suite_path.glob("*.scenario.json"))
    if not scenario_files:
        raise ScenarioValidationError(f"no *.scenario.json files in {suite_dir}")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = []
    combined = AffectiveMemory()
    for path in scenario_files:
        script = load_scenario(path)
        result = run_scenario(script, cfg, lexicon)
        results.append(result)
        (out / f"{script.subject_id}.transcript.jsonl").write_text(
            transcript_jsonl(result.transcript), encoding="utf-8"
        )
        result.memory.save(out / f"{script.subject_id}.memory.json")
        for record in result.memory.all_records():
            combined.commit(record)
        click.echo(f"ran {path.name}: {result.metrics.total_extensions} extensions")

    combined.save(out / "memory.json")
    export_space_csv(combined, out / "space.csv")
    report = summarize_runs([r.metrics for r in results])
    (out / "report.txt").write_text(report.to_text(), encoding="utf-8")
    with open(out / "report.csv", "w", encoding="utf-8", newline="") as fh:
        csv.writer(fh).writerows(report.to_csv_rows())

    missing = check_suite_coverage(results)
    if missing:
        click.echo(_styled(f"coverage gaps: {', '.join(missing)}", fg="yellow"))
    else:
        click.echo(_styled("suite coverage complete", fg="green"))
    click.echo(report.to_text(), nl=False)


@main.command()
@click.option("--memory", "memory_path", required=True, type=click.Path(exists=True))
@click.option("--csv", "csv_path", required=True, type=click.Path())
@_cli_errors
def export(memory_path, csv_path) -> None:
    """Export a memory file to the association-space CSV."""
    memory = load_memory(memory_path)
    export_space_csv(memory, csv_path)
    click.echo(f"wrote {len(memory)} rows to {csv_path}")


@main.command()
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--subject", default="interactive")
@_cli_errors
def interactive(lexicon_path, config_path, subject) -> None:
    """Terminal-based live session for development.

    Facial input is typed as 'valence arousal' pairs (one constant block
    per perceiving phase) in place of camera frames.
    """
    cfg = load_session_config(config_path) if config_path else default_session_config()
    lexicon = load_lexicon(lexicon_path) if lexicon_path else default_lexicon()
    memory = AffectiveMemory()
    deps = EngineDeps(language_valence=lambda u: lexicon_valence(u, lexicon), memory=memory)
    state, actions = start_session(subject, cfg)
    _show_actions(actions, cfg)

    while state.phase is not Phase.DONE:
        if state.phase is Phase.PLAYING_STIMULUS:
            frames = _read_frames(f"reaction to {cfg.stimuli[state.current_index].id}")
            event = StimulusFinished(frames=frames)
        elif state.phase in (Phase.AWAIT_DESCRIPTION, Phase.CLARIFYING):
            text = click.prompt("you say")
            frames = ()
            if state.phase is Phase.CLARIFYING:
                frames = _read_frames("your face while answering")
            event = UtteranceReceived(Utterance(text=text, synchronous_frames=frames))
        elif state.phase is Phase.AWAIT_RATING:
            event = RatingReceived(rating=click.prompt("rating 1..5", type=click.IntRange(1, 5)))
        elif state.phase is Phase.PLAYBACK:
            click.pause("playback finished; press any key")
            event = PlaybackFinished()
        else:
            top = click.prompt(f"how many replays were in your top {cfg.top_k}", type=int)
            bottom = click.prompt(f"how many in your bottom {cfg.top_k}", type=int)
            event = FinalFeedback(top_hits=top, bottom_hits=bottom)

        state, actions = advance(state, event, cfg, deps)
        if state.initial_scores is not None and state.phase is Phase.AWAIT_RATING:
            zone = classify_zone(state.initial_scores, cfg.zone_config)
            click.echo(
                f"  scores: vision {state.initial_scores.vision:+.3f}, "
                f"language {state.initial_scores.language:+.3f} -> {zone.value}"
            )
        _show_actions(actions, cfg)

    click.echo(json.dumps(session_snapshot(state), indent=2))


def _read_frames(label: str):
    raw = click.prompt(f"{label} as 'valence arousal' (blank for none)", default="", show_default=False)
    if not raw.strip():
        return ()
    try:
        valence, arousal = (float(p) for p in raw.split())
    except ValueError:
        click.echo("  could not parse, treating as no visible reaction")
        return ()
    return constant_frames(valence, arousal, 12)


def _show_actions(actions, cfg) -> None:
    durations = {s.id: s.duration_ms for s in cfg.stimuli}
    for action in actions:
        if isinstance(action, Say):
            click.echo(_styled(f"<< {action.text}", fg="cyan"))
        elif isinstance(action, PlayStimulus):
            click.echo(
                _styled(f"<< [playing {action.stimulus_id}, {durations[action.stimulus_id]} ms]", fg="cyan")
            )
        elif isinstance(action, RequestRating):
            click.echo(_styled("<< [please rate it 1..5]", fg="cyan"))
        elif isinstance(action, ReplayStimuli):
            click.echo(
                _styled(f"<< [replaying favourites: {', '.join(action.stimulus_ids)}]", fg="cyan")
            )
        else:
            click.echo(_styled("<< [session over, thanks!]", fg="cyan"))


@main.command()
@click.option("--port", default=8000, type=int)
@click.option("--host", default="127.0.0.1")
@click.option("--persist", "persist_dir", type=click.Path(file_okay=False), default=None)
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True), default=None)
@click.option("--allow-origin", "allow_origins", multiple=True)
@_cli_errors
def serve(port, host, persist_dir, lexicon_path, allow_origins) -> None:
    """Run the HTTP session service for the web client."""
    import uvicorn

    from .service import create_app

    lexicon = load_lexicon(lexicon_path) if lexicon_path else default_lexicon()
    app = create_app(
        lexicon=lexicon, persist_dir=persist_dir, allow_origins=list(allow_origins)
    )
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
