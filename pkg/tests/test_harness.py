from __future__ import annotations

import csv

import pytest

from affectspace.core import Modality, Zone, preference_score
from affectspace.engine import transcript_digest
from affectspace.errors import EmptyMemoryError, ScenarioValidationError
from affectspace.harness import (
    CSV_HEADER,
    check_suite_coverage,
    export_space_csv,
    run_scenario,
    summarize_runs,
)
from affectspace.memory import AffectiveMemory
from conftest import SUBJECTS


@pytest.fixture(scope="module")
def suite_results(suite_config, suite_scripts, lexicon):
    return {
        name: run_scenario(suite_scripts[name], suite_config, lexicon) for name in SUBJECTS
    }


# --- run_scenario -----------------------------------------------------------------


def test_all_coherent_script_runs_without_clarifications(suite_results, suite_config) -> None:
    result = suite_results["cho"]
    assert result.metrics.mismatch_count == 0
    assert result.metrics.total_extensions == 0
    assert result.metrics.resolution_rate == 1.0
    assert len(result.memory) == 9
    prompts = suite_config.prompts
    clarification_texts = {
        prompts.follow_up,
        prompts.hypothesis_vision_positive,
        prompts.hypothesis_vision_negative,
        prompts.hypothesis_language_positive,
        prompts.hypothesis_language_negative,
    }
    said = [r["text"] for r in result.transcript if r["kind"] == "action" and r["type"] == "say"]
    assert not clarification_texts.intersection(said)


def test_single_extension_resolution(suite_results, suite_config) -> None:
    result = suite_results["ava"]
    record = result.memory.get("ava", "slow_ballad")
    assert record is not None
    assert record.extensions_used == 1
    assert record.resolved is True
    assert result.metrics.extension_counts["slow_ballad"] == 1


def test_never_cohering_script_forces_unresolved_commit(suite_results, suite_config) -> None:
    record = suite_results["ben"].memory.get("ben", "slow_ballad")
    assert record is not None
    assert record.extensions_used == suite_config.max_extensions == 5
    assert record.resolved is False


def test_metrics_hit_counts(suite_results) -> None:
    expected_hits = {"ava": 2, "ben": 3, "cho": 3, "dia": 2}
    for name, hits in expected_hits.items():
        metrics = suite_results[name].metrics
        assert metrics.top_k_hits == hits
        assert metrics.bottom_k_contamination == 0
        assert 0 <= metrics.top_k_hits <= metrics.top_k


def test_run_scenario_rejects_config_mismatch(suite_scripts, lexicon, suite_config) -> None:
    from dataclasses import replace

    bad_cfg = replace(suite_config, stimuli=suite_config.stimuli[:5], top_k=3)
    with pytest.raises(ScenarioValidationError, match="unknown stimuli"):
        run_scenario(suite_scripts["ava"], bad_cfg, lexicon)


def test_top_k_over_scripted_session_matches_sort_oracle(suite_results, suite_config) -> None:
    from affectspace.engine import select_top_k
    from oracles import oracle_top_k

    records = suite_results["ava"].memory.query_subject("ava")
    assert len(records) == 9
    prefs = [(r.stimulus_id, preference_score(r.final_scores)) for r in records]
    assert select_top_k(records, suite_config.top_k) == oracle_top_k(prefs, suite_config.top_k)


def test_run_scenario_is_deterministic(suite_scripts, suite_config, lexicon) -> None:
    first = run_scenario(suite_scripts["dia"], suite_config, lexicon)
    second = run_scenario(suite_scripts["dia"], suite_config, lexicon)
    assert transcript_digest(first.transcript) == transcript_digest(second.transcript)
    assert first.memory.to_json() == second.memory.to_json()


# --- CSV export ------------------------------------------------------------------


def test_export_csv_shape_and_values(suite_results, tmp_path) -> None:
    combined = AffectiveMemory()
    for result in suite_results.values():
        for record in result.memory.all_records():
            combined.commit(record)
    out = tmp_path / "space.csv"
    export_space_csv(combined, out)

    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == CSV_HEADER.split(",")
    assert len(rows) == 1 + len(combined)  # header + one row per record

    by_key = {(r.subject_id, r.stimulus_id): r for r in combined.all_records()}
    for row in rows[1:]:
        record = by_key[(row[0], row[1])]
        assert row[2] == record.category
        assert float(row[3]) == pytest.approx(record.initial_scores.vision, rel=1e-5, abs=1e-9)
        assert float(row[4]) == pytest.approx(record.initial_scores.language, rel=1e-5, abs=1e-9)
        assert float(row[5]) == pytest.approx(record.final_scores.vision, rel=1e-5, abs=1e-9)
        assert float(row[6]) == pytest.approx(record.final_scores.language, rel=1e-5, abs=1e-9)
        assert row[7] == record.zone_initial.value
        assert row[8] == record.zone_final.value
        assert int(row[9]) == record.extensions_used
        assert row[10] == ("true" if record.resolved else "false")
        assert row[11] == ("" if record.rating is None else str(record.rating))
        if record.extensions_used == 0:
            assert row[3] == row[5] and row[4] == row[6]


def test_export_csv_empty_memory_errors_without_file(tmp_path) -> None:
    out = tmp_path / "space.csv"
    with pytest.raises(EmptyMemoryError):
        export_space_csv(AffectiveMemory(), out)
    assert not out.exists()


# --- summarize_runs ---------------------------------------------------------------


def test_summarize_single_run_echoes_metrics(suite_results) -> None:
    metrics = suite_results["cho"].metrics
    report = summarize_runs([metrics])
    assert report.run_count == 1
    assert report.mean_extensions == 0.0
    assert report.max_extensions == 0
    assert report.mean_top_k_hit_rate == pytest.approx(metrics.top_k_hit_rate)


def test_summarize_suite_song_beats_noise(suite_results) -> None:
    report = summarize_runs([r.metrics for r in suite_results.values()])
    assert report.mean_preference_by_category["song"] > report.mean_preference_by_category["noise"]
    assert report.max_extensions == 5
    assert 0 < report.resolution_rate < 1  # ben's forced commit keeps it below 1
    text = report.to_text()
    assert "mean preference (song)" in text
    assert len(report.to_csv_rows()) >= 8


def test_summarize_empty_errors() -> None:
    with pytest.raises(ScenarioValidationError):
        summarize_runs([])


# --- coverage self-check --------------------------------------------------------------


def test_suite_exercises_every_required_behaviour(suite_results) -> None:
    assert check_suite_coverage(list(suite_results.values())) == []


def test_coverage_reports_gaps_for_partial_suite(suite_results) -> None:
    missing = check_suite_coverage([suite_results["cho"]])  # all-coherent run only
    assert "mem:vision" in missing
    assert "commit:forced_unresolved" in missing


def test_outcomes_cover_both_mem_modalities_and_both_verdicts(suite_results) -> None:
    outcomes = [o for r in suite_results.values() for o in r.outcomes if o.extensions_used]
    mems = {o.initial_mem for o in outcomes}
    verdicts = {o.hypothesis_confirmed for o in outcomes}
    obs_zones = {o.observation_zone for o in outcomes}
    assert mems == {Modality.VISION, Modality.LANGUAGE}
    assert {True, False} <= verdicts
    assert Zone.NEUTRAL in obs_zones


# --- per-category preference bookkeeping -----------------------------------------------


def test_preference_sums_match_records(suite_results) -> None:
    for result in suite_results.values():
        metrics = result.metrics
        for category in ("song", "noise"):
            records = [r for r in result.memory.all_records() if r.category == category]
            assert metrics.stimulus_count_by_category[category] == len(records)
            assert metrics.preference_sum_by_category[category] == pytest.approx(
                sum(preference_score(r.final_scores) for r in records)
            )
