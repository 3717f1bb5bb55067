"""Pure numeric core of the affective association space.

Everything in this module is a deterministic function over small value
types: per-modality emotional scores, the five-zone classification of the
(vision, language) plane, most-extreme-modality selection, and the
boost/attenuate consolidation update applied after a clarification
dialogue. No I/O, no state, no randomness; safe to call from any thread.

Conventions:
  - Both axes live in [-1, 1]. Vision is valence modulated by arousal
    (arousal remapped to [0, 2] so polarity is preserved), then halved
    back onto [-1, 1]. Language is a sigmoid-range valence remapped from
    [0, 1] onto [-1, 1].
  - All numeric inputs are clamped, never rejected; perception backends
    are untrusted. Callers that care about out-of-range inputs log them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


def clamp(value: float, lo: float = -1.0, hi: float = 1.0) -> float:
    """Clamp value into [lo, hi]."""
    if value < lo:
        return lo
    if value > hi:
        return hi
    return value


@dataclass(frozen=True)
class EmotionalScores:
    """A point in the 2D association space: (vision score, language score).

    Both coordinates are clamped into [-1, 1] at construction.
    """

    vision: float
    language: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "vision", clamp(float(self.vision)))
        object.__setattr__(self, "language", clamp(float(self.language)))


class Zone(str, Enum):
    """The five regions of the association space.

    The neutral zone is a cross: either axis falling strictly inside its
    threshold band makes the whole point neutral. Neutral counts as
    coherent; only the two opposite-sign quadrants are mismatches.
    """

    COHERENT_POSITIVE = "coherent_positive"
    COHERENT_NEGATIVE = "coherent_negative"
    NEUTRAL = "neutral"
    MISMATCH_VISION_POS_LANG_NEG = "mismatch_vision_pos_lang_neg"
    MISMATCH_VISION_NEG_LANG_POS = "mismatch_vision_neg_lang_pos"


class Modality(str, Enum):
    VISION = "vision"
    LANGUAGE = "language"


@dataclass(frozen=True)
class ZoneConfig:
    """Neutral-band half-widths for each axis.

    Defaults are the pilot-study values: 0.075 on the vision axis and
    0.04 on the language axis.
    """

    theta_vision: float = 0.075
    theta_language: float = 0.04

    def __post_init__(self) -> None:
        for name in ("theta_vision", "theta_language"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must be in (0, 1), got {v!r}")


@dataclass(frozen=True)
class ConsolidationParams:
    """Weights for the boost/attenuate/blend consolidation update."""

    boost_weight: float = 0.5
    attenuation_factor: float = 0.5
    neutral_blend: float = 0.5

    def __post_init__(self) -> None:
        for name in ("boost_weight", "attenuation_factor", "neutral_blend"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v!r}")


def normalize_arousal(arousal: float) -> float:
    """Map arousal from [-1, 1] onto [0, 2].

    The shift keeps arousal as a nonnegative modulation factor so that
    multiplying it into valence never flips the valence sign. Inputs
    outside [-1, 1] are clamped first.
    """
    return clamp(arousal) + 1.0


def vision_score(mean_valence: float, mean_arousal: float) -> float:
    """Emotional score for the vision modality.

    valence x normalized arousal spans [-2, 2]; the final division by 2
    puts the vision axis on the same [-1, 1] range as language so one
    ZoneConfig applies to both. sign(result) == sign(valence) whenever
    arousal > -1.
    """
    return clamp(mean_valence) * normalize_arousal(mean_arousal) / 2.0


def language_score(raw_valence: float) -> float:
    """Emotional score for the language modality.

    The perception backend contract is sigmoid-range valence in [0, 1];
    this remaps it onto [-1, 1] with 0.5 mapping to exactly 0.
    """
    return 2.0 * clamp(raw_valence, 0.0, 1.0) - 1.0


def classify_zone(scores: EmotionalScores, cfg: ZoneConfig | None = None) -> Zone:
    """Assign scores to exactly one of the five zones.

    Neutral iff |vision| < theta_vision or |language| < theta_language
    (strict: a score exactly at the threshold is not neutral). Outside
    the cross both axes are nonzero, so the quadrant is decided by signs.
    """
    cfg = cfg or ZoneConfig()
    if abs(scores.vision) < cfg.theta_vision or abs(scores.language) < cfg.theta_language:
        return Zone.NEUTRAL
    if scores.vision > 0.0:
        return Zone.COHERENT_POSITIVE if scores.language > 0.0 else Zone.MISMATCH_VISION_POS_LANG_NEG
    return Zone.MISMATCH_VISION_NEG_LANG_POS if scores.language > 0.0 else Zone.COHERENT_NEGATIVE


def is_coherent(zone: Zone) -> bool:
    """Neutral and both same-sign quadrants count as coherent."""
    return zone in (Zone.COHERENT_POSITIVE, Zone.COHERENT_NEGATIVE, Zone.NEUTRAL)


def is_mismatch(zone: Zone) -> bool:
    return not is_coherent(zone)


def most_extreme_modality(scores: EmotionalScores) -> Modality:
    """The modality with the larger absolute score.

    Exact ties go to language: spoken self-report is the more deliberate
    channel, and the clarification example in the source protocol trusts
    what the subject said over how they looked.
    """
    if abs(scores.vision) > abs(scores.language):
        return Modality.VISION
    return Modality.LANGUAGE


def consolidate(
    original: EmotionalScores,
    final_observation: EmotionalScores,
    params: ConsolidationParams | None = None,
    cfg: ZoneConfig | None = None,
) -> EmotionalScores:
    """Merge a mismatched initial reaction with the final clarification observation.

    The committed association modulates the original reaction with the
    observation rather than replacing it:

      - observation neutral: blend both axes toward the observation by
        ``neutral_blend`` (clarification answers often de-escalate toward
        neutral faces; the blend records that without erasing the initial
        reaction);
      - otherwise: the observation's most extreme modality is boosted
        toward the observed value on that axis
        (``s += boost_weight * o``, clamped), and the other axis is
        multiplied by ``attenuation_factor``. When the observation's MEM
        matches the original's, this is the hypothesis-confirmed boost;
        when it flips, the newly extreme modality wins and the old MEM is
        the one attenuated.

    Coherent ``original`` (precondition violation) is returned unchanged.
    """
    params = params or ConsolidationParams()
    cfg = cfg or ZoneConfig()
    if is_coherent(classify_zone(original, cfg)):
        return original

    if classify_zone(final_observation, cfg) is Zone.NEUTRAL:
        b = params.neutral_blend
        return EmotionalScores(
            vision=(1.0 - b) * original.vision + b * final_observation.vision,
            language=(1.0 - b) * original.language + b * final_observation.language,
        )

    boosted = most_extreme_modality(final_observation)
    if boosted is Modality.VISION:
        return EmotionalScores(
            vision=clamp(original.vision + params.boost_weight * final_observation.vision),
            language=original.language * params.attenuation_factor,
        )
    return EmotionalScores(
        vision=original.vision * params.attenuation_factor,
        language=clamp(original.language + params.boost_weight * final_observation.language),
    )


def preference_score(scores: EmotionalScores) -> float:
    """Scalar preference used to rank stimuli: the mean of the two axes."""
    return (scores.vision + scores.language) / 2.0
