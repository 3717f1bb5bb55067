from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from affectspace.core import (
    ConsolidationParams,
    EmotionalScores,
    Modality,
    Zone,
    ZoneConfig,
    classify_zone,
    clamp,
    consolidate,
    is_coherent,
    is_mismatch,
    language_score,
    most_extreme_modality,
    normalize_arousal,
    preference_score,
    vision_score,
)
from oracles import oracle_zone

scores_floats = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


# --- normalize_arousal ------------------------------------------------------


@pytest.mark.parametrize("a,expected", [(-1.0, 0.0), (0.0, 1.0), (1.0, 2.0)])
def test_normalize_arousal_endpoints(a, expected) -> None:
    assert normalize_arousal(a) == expected


def test_normalize_arousal_clamps_out_of_range() -> None:
    assert normalize_arousal(-3.0) == 0.0
    assert normalize_arousal(7.0) == 2.0


@given(st.floats(min_value=-1.0, max_value=1.0, allow_nan=False))
def test_normalize_arousal_onto_0_2(a) -> None:
    assert 0.0 <= normalize_arousal(a) <= 2.0


@given(scores_floats, scores_floats)
def test_normalize_arousal_monotone(a, b) -> None:
    lo, hi = min(a, b), max(a, b)
    assert normalize_arousal(lo) <= normalize_arousal(hi)


# --- vision_score -----------------------------------------------------------


@pytest.mark.parametrize(
    "valence,arousal,expected",
    [(0.6, 0.5, 0.45), (-0.4, 1.0, -0.4), (0.9, -1.0, 0.0)],
)
def test_vision_score_examples(valence, arousal, expected) -> None:
    assert vision_score(valence, arousal) == pytest.approx(expected)


@given(
    st.floats(min_value=-1.0, max_value=1.0, allow_nan=False).filter(lambda v: v != 0.0),
    st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, exclude_min=True),
)
def test_vision_score_preserves_polarity(valence, arousal) -> None:
    score = vision_score(valence, arousal)
    assert (score > 0) == (valence > 0)


@given(scores_floats, scores_floats)
def test_vision_score_in_range(valence, arousal) -> None:
    assert -1.0 <= vision_score(valence, arousal) <= 1.0


# --- language_score ---------------------------------------------------------


@pytest.mark.parametrize("raw,expected", [(0.5, 0.0), (1.0, 1.0), (0.75, 0.5), (0.0, -1.0)])
def test_language_score_examples(raw, expected) -> None:
    assert language_score(raw) == pytest.approx(expected)


def test_language_score_clamps() -> None:
    assert language_score(1.7) == 1.0
    assert language_score(-0.2) == -1.0


# --- classify_zone ----------------------------------------------------------


@pytest.mark.parametrize(
    "sv,sl,expected",
    [
        (0.5, 0.5, Zone.COHERENT_POSITIVE),
        (0.05, 0.5, Zone.NEUTRAL),
        (0.5, -0.5, Zone.MISMATCH_VISION_POS_LANG_NEG),
        (-0.2, -0.9, Zone.COHERENT_NEGATIVE),
        (-0.5, 0.5, Zone.MISMATCH_VISION_NEG_LANG_POS),
        (0.5, 0.03, Zone.NEUTRAL),
    ],
)
def test_classify_zone_examples(sv, sl, expected) -> None:
    assert classify_zone(EmotionalScores(sv, sl)) is expected


def test_threshold_boundary_is_not_neutral() -> None:
    cfg = ZoneConfig()
    assert classify_zone(EmotionalScores(0.075, 0.04), cfg) is Zone.COHERENT_POSITIVE
    assert classify_zone(EmotionalScores(-0.075, 0.04), cfg) is Zone.MISMATCH_VISION_NEG_LANG_POS
    assert classify_zone(EmotionalScores(0.0749, 0.5), cfg) is Zone.NEUTRAL


@given(scores_floats, scores_floats)
def test_classify_zone_matches_predicate_oracle(sv, sl) -> None:
    scores = EmotionalScores(sv, sl)
    assert classify_zone(scores).value == oracle_zone(scores.vision, scores.language)


@given(scores_floats, scores_floats)
def test_mirror_symmetry_outside_neutral_cross(sv, sl) -> None:
    cfg = ZoneConfig()
    if abs(sv) < cfg.theta_vision or abs(sl) < cfg.theta_language:
        return
    mirror = {
        Zone.COHERENT_POSITIVE: Zone.COHERENT_NEGATIVE,
        Zone.COHERENT_NEGATIVE: Zone.COHERENT_POSITIVE,
        Zone.MISMATCH_VISION_POS_LANG_NEG: Zone.MISMATCH_VISION_NEG_LANG_POS,
        Zone.MISMATCH_VISION_NEG_LANG_POS: Zone.MISMATCH_VISION_POS_LANG_NEG,
    }
    zone = classify_zone(EmotionalScores(sv, sl), cfg)
    assert classify_zone(EmotionalScores(-sv, -sl), cfg) is mirror[zone]


def test_zone_config_validation() -> None:
    with pytest.raises(ValueError):
        ZoneConfig(theta_vision=0.0)
    with pytest.raises(ValueError):
        ZoneConfig(theta_language=1.0)


# --- is_coherent ------------------------------------------------------------


@pytest.mark.parametrize(
    "zone,expected",
    [
        (Zone.NEUTRAL, True),
        (Zone.COHERENT_POSITIVE, True),
        (Zone.COHERENT_NEGATIVE, True),
        (Zone.MISMATCH_VISION_POS_LANG_NEG, False),
        (Zone.MISMATCH_VISION_NEG_LANG_POS, False),
    ],
)
def test_is_coherent(zone, expected) -> None:
    assert is_coherent(zone) is expected
    assert is_mismatch(zone) is not expected


# --- most_extreme_modality ----------------------------------------------------


@pytest.mark.parametrize(
    "sv,sl,expected",
    [
        (0.3, -0.8, Modality.LANGUAGE),
        (-0.9, 0.1, Modality.VISION),
        (0.5, -0.5, Modality.LANGUAGE),  # exact tie goes to language
        (0.0, 0.0, Modality.LANGUAGE),
    ],
)
def test_most_extreme_modality(sv, sl, expected) -> None:
    assert most_extreme_modality(EmotionalScores(sv, sl)) is expected


# --- consolidate --------------------------------------------------------------


def test_consolidate_confirmed_language_mem_clamps() -> None:
    result = consolidate(EmotionalScores(0.2, -0.8), EmotionalScores(-0.1, -0.6))
    assert result.vision == pytest.approx(0.1)
    assert result.language == -1.0


def test_consolidate_confirmed_vision_mem() -> None:
    original = EmotionalScores(0.9, -0.1)
    assert classify_zone(original) is Zone.MISMATCH_VISION_POS_LANG_NEG
    result = consolidate(original, EmotionalScores(0.7, 0.2))
    assert result.vision == 1.0
    assert result.language == pytest.approx(-0.05)


def test_consolidate_identity_on_coherent_original() -> None:
    original = EmotionalScores(0.5, 0.5)
    assert consolidate(original, EmotionalScores(-0.9, -0.9)) == original


def test_consolidate_disconfirmed_boosts_new_mem() -> None:
    # Original MEM is vision; observation's MEM flips to language.
    original = EmotionalScores(-0.63, 0.6)
    observation = EmotionalScores(0.198, 0.8)
    result = consolidate(original, observation)
    assert result.language == pytest.approx(1.0)
    assert result.vision == pytest.approx(-0.315)


def test_consolidate_neutral_observation_blends_both_axes() -> None:
    original = EmotionalScores(-0.3, 0.5)
    observation = EmotionalScores(0.025, 0.2)
    assert classify_zone(observation) is Zone.NEUTRAL
    result = consolidate(original, observation)
    assert result.vision == pytest.approx(-0.1375)
    assert result.language == pytest.approx(0.35)


mismatch_scores = st.tuples(scores_floats, scores_floats).filter(
    lambda t: is_mismatch(classify_zone(EmotionalScores(*t)))
)


@given(mismatch_scores, st.tuples(scores_floats, scores_floats))
def test_consolidation_laws(original_pair, observation_pair) -> None:
    cfg = ZoneConfig()
    params = ConsolidationParams()
    original = EmotionalScores(*original_pair)
    observation = EmotionalScores(*observation_pair)
    result = consolidate(original, observation, params, cfg)

    assert -1.0 <= result.vision <= 1.0
    assert -1.0 <= result.language <= 1.0

    if classify_zone(observation, cfg) is Zone.NEUTRAL:
        return
    boosted = most_extreme_modality(observation)
    if boosted is Modality.VISION:
        attenuated_out, attenuated_in = result.language, original.language
        boosted_out, boosted_in, obs_axis = result.vision, original.vision, observation.vision
    else:
        attenuated_out, attenuated_in = result.vision, original.vision
        boosted_out, boosted_in, obs_axis = result.language, original.language, observation.language

    # Contraction on the attenuated axis.
    assert abs(attenuated_out) <= abs(attenuated_in) + 1e-12
    # Boost direction when the observation agrees in sign.
    if boosted is most_extreme_modality(original) and obs_axis * boosted_in > 0:
        assert abs(boosted_out) >= abs(boosted_in) - 1e-12


# --- preference_score -----------------------------------------------------------


@pytest.mark.parametrize(
    "sv,sl,expected", [(1.0, 1.0, 1.0), (0.4, -0.4, 0.0), (0.6, 0.2, 0.4)]
)
def test_preference_score_examples(sv, sl, expected) -> None:
    assert preference_score(EmotionalScores(sv, sl)) == pytest.approx(expected)


@given(
    st.lists(st.tuples(scores_floats, scores_floats), min_size=1, max_size=8),
    st.floats(min_value=0.01, max_value=5.0, allow_nan=False),
)
def test_preference_argmax_invariant_under_positive_scaling(pairs, scale) -> None:
    # Scaling happens pre-clamp: compare raw scaled means, not clamped scores.
    base = [preference_score(EmotionalScores(v, l)) for v, l in pairs]
    scaled = [scale * (clamp(v) + clamp(l)) / 2.0 for v, l in pairs]

    def argmax(values):
        best = 0
        for i, value in enumerate(values):
            if value > values[best]:
                best = i
        return best

    assert argmax(base) == argmax(scaled)


# --- EmotionalScores construction ---------------------------------------------


def test_scores_clamped_at_construction() -> None:
    s = EmotionalScores(4.2, -9.9)
    assert s.vision == 1.0
    assert s.language == -1.0


def test_consolidation_params_validation() -> None:
    with pytest.raises(ValueError):
        ConsolidationParams(boost_weight=1.5)
    with pytest.raises(ValueError):
        ConsolidationParams(neutral_blend=-0.1)
