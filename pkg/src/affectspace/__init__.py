"""Affective association engine.

Fuses a vision emotion signal (valence x arousal) and a language valence
signal into a five-zone association space, resolves cross-modal mismatches
through a bounded clarification dialogue, and keeps per-subject, per-
stimulus affective memory used to pick preferred stimuli.
"""

from .core import (
    ConsolidationParams,
    EmotionalScores,
    Modality,
    Zone,
    ZoneConfig,
    classify_zone,
    consolidate,
    is_coherent,
    is_mismatch,
    language_score,
    most_extreme_modality,
    normalize_arousal,
    preference_score,
    vision_score,
)
from .engine import (
    EngineDeps,
    Phase,
    PromptTemplates,
    SessionConfig,
    SessionState,
    StimulusCategory,
    StimulusRef,
    advance,
    render_hypothesis_prompt,
    select_top_k,
    start_session,
)
from .memory import AffectiveMemory, AssociationRecord, load_memory
from .perception import (
    FaceFrame,
    Lexicon,
    ReactionAggregate,
    Utterance,
    aggregate_reaction,
    default_lexicon,
    expressiveness,
    lexicon_valence,
    load_lexicon,
    summarize_chunk,
)

__version__ = "0.1.0"

__all__ = [
    "AffectiveMemory",
    "AssociationRecord",
    "ConsolidationParams",
    "EmotionalScores",
    "EngineDeps",
    "FaceFrame",
    "Lexicon",
    "Modality",
    "Phase",
    "PromptTemplates",
    "ReactionAggregate",
    "SessionConfig",
    "SessionState",
    "StimulusCategory",
    "StimulusRef",
    "Utterance",
    "Zone",
    "ZoneConfig",
    "advance",
    "aggregate_reaction",
    "classify_zone",
    "consolidate",
    "default_lexicon",
    "expressiveness",
    "is_coherent",
    "is_mismatch",
    "language_score",
    "lexicon_valence",
    "load_lexicon",
    "load_memory",
    "most_extreme_modality",
    "normalize_arousal",
    "preference_score",
    "render_hypothesis_prompt",
    "select_top_k",
    "start_session",
    "summarize_chunk",
    "vision_score",
]
