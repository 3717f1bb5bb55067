"""Perception contract and frame aggregation.

The vision side of the pipeline consumes timestamped FaceFrames sampled at
~3 Hz while a stimulus plays. Frames are grouped into tumbling chunks of
four; each chunk keeps the two most expressive faces; the top half of the
chunk summaries (by expressiveness) are averaged into the reaction
aggregate that feeds the vision score. The selection acts as an attention
filter: long stretches of neutral faces do not wash out the reaction.

The language side is a pluggable backend mapping an utterance to a raw
valence in [0, 1]. The bundled backend is a small sentiment lexicon with
one-token negation handling; a learned model would plug into the same
contract.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import clamp
from .errors import EmptyChunkError, LexiconError

CHUNK_SIZE = 4
FRAME_RATE_HZ = 3.0

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class FaceFrame:
    """One vision sample: milliseconds since stimulus onset plus valence/arousal.

    Valence and arousal are clamped into [-1, 1] at construction.
    """

    timestamp_ms: int
    valence: float
    arousal: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "timestamp_ms", int(self.timestamp_ms))
        object.__setattr__(self, "valence", clamp(float(self.valence)))
        object.__setattr__(self, "arousal", clamp(float(self.arousal)))


@dataclass(frozen=True)
class ChunkSummary:
    mean_valence: float
    mean_arousal: float
    expressiveness: float


@dataclass(frozen=True)
class ReactionAggregate:
    """Averaged (valence, arousal) over the most expressive chunk summaries."""

    mean_valence: float
    mean_arousal: float
    frame_count: int
    chunk_count: int


@dataclass(frozen=True)
class Utterance:
    """Spoken (or typed) text, optionally with facial frames captured while speaking."""

    text: str
    synchronous_frames: tuple[FaceFrame, ...] = ()

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("utterance text is empty")
        object.__setattr__(self, "synchronous_frames", tuple(self.synchronous_frames))


@dataclass(frozen=True)
class Lexicon:
    """Token -> valence weight map plus a set of negator tokens."""

    entries: Mapping[str, float]
    negators: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        for token, weight in self.entries.items():
            if token != token.lower() or any(ch.isspace() for ch in token):
                raise ValueError(f"lexicon token {token!r} must be lowercase with no whitespace")
            if not -1.0 <= weight <= 1.0:
                raise ValueError(f"lexicon weight for {token!r} out of [-1, 1]: {weight!r}")
        for token in self.negators:
            if token != token.lower() or any(ch.isspace() for ch in token):
                raise ValueError(f"negator token {token!r} must be lowercase with no whitespace")
        object.__setattr__(self, "negators", frozenset(self.negators))


def expressiveness(valence: float, arousal: float) -> float:
    """|valence x (arousal + 1)|: magnitude of the arousal-modulated valence.

    This is the same modulated quantity the vision score uses, so frame
    selection and scoring agree on what "expressive" means.
    """
    return abs(clamp(valence) * (clamp(arousal) + 1.0))


def summarize_chunk(frames: Sequence[FaceFrame]) -> ChunkSummary:
    """Average the two most expressive frames of a chunk (ties: earlier frame).

    Chunks of fewer than two frames are averaged whole. Raises
    EmptyChunkError on no frames; callers skip empty chunks.
    """
    if not frames:
        raise EmptyChunkError("cannot summarize an empty chunk")
    ranked = sorted(frames, key=lambda f: (-expressiveness(f.valence, f.arousal), f.timestamp_ms))
    keep = ranked[: min(2, len(ranked))]
    mv = sum(f.valence for f in keep) / len(keep)
    ma = sum(f.arousal for f in keep) / len(keep)
    return ChunkSummary(mean_valence=mv, mean_arousal=ma, expressiveness=expressiveness(mv, ma))


def aggregate_reaction(frames: Iterable[FaceFrame]) -> ReactionAggregate:
    """Reduce a whole reaction's frame stream to one (valence, arousal) pair.

    Frames are ordered by timestamp and partitioned into tumbling chunks of
    four (a trailing partial chunk is kept). Each chunk is summarized by
    its two most expressive frames; the ceil(k/2) most expressive chunk
    summaries (ties: earlier chunk) are averaged unweighted. An empty
    stream aggregates to zero: a stimulus with no visible reaction reads
    as neutral, not as an error.
    """
    ordered = sorted(frames, key=lambda f: f.timestamp_ms)
    if not ordered:
        return ReactionAggregate(0.0, 0.0, frame_count=0, chunk_count=0)

    summaries = [
        summarize_chunk(ordered[i : i + CHUNK_SIZE]) for i in range(0, len(ordered), CHUNK_SIZE)
    ]
    take = math.ceil(len(summaries) / 2)
    best = sorted(range(len(summaries)), key=lambda i: (-summaries[i].expressiveness, i))[:take]
    chosen = [summaries[i] for i in best]
    return ReactionAggregate(
        mean_valence=sum(s.mean_valence for s in chosen) / take,
        mean_arousal=sum(s.mean_arousal for s in chosen) / take,
        frame_count=len(ordered),
        chunk_count=len(summaries),
    )


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on non-alphanumeric boundaries."""
    return _TOKEN_RE.findall(text.lower())


def lexicon_valence(utterance: Utterance, lexicon: Lexicon) -> float:
    """Score an utterance into the backend's sigmoid-range [0, 1] contract.

    Each matched token contributes its weight, sign-flipped when the
    immediately preceding token is a negator. The mean matched weight m
    (0 when nothing matches) maps to (clamp(m) + 1) / 2, so an utterance
    with no sentiment words reads as exactly neutral (0.5).
    """
    tokens = tokenize(utterance.text)
    matched: list[float] = []
    for i, token in enumerate(tokens):
        weight = lexicon.entries.get(token)
        if weight is None:
            continue
        if i > 0 and tokens[i - 1] in lexicon.negators:
            weight = -weight
        matched.append(weight)
    mean = sum(matched) / len(matched) if matched else 0.0
    return (clamp(mean) + 1.0) / 2.0


def parse_lexicon(lines: Iterable[str], source: str = "<lexicon>") -> Lexicon:
    """Parse lexicon lines: ``token<TAB>weight`` entries, ``!token`` negators.

    Lines starting with ``#`` and blank lines are skipped. Anything else
    malformed (missing tab, bad float, weight outside [-1, 1], whitespace
    inside a token) is rejected with its line number.
    """
    entries: dict[str, float] = {}
    negators: set[str] = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("!"):
            token = line[1:].strip().lower()
            if not token or any(ch.isspace() for ch in token):
                raise LexiconError(f"{source}:{lineno}: malformed negator line {line!r}")
            negators.add(token)
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise LexiconError(f"{source}:{lineno}: expected 'token<TAB>weight', got {line!r}")
        token = parts[0].strip().lower()
        if not token or any(ch.isspace() for ch in token):
            raise LexiconError(f"{source}:{lineno}: malformed token {parts[0]!r}")
        try:
            weight = float(parts[1])
        except ValueError:
            raise LexiconError(f"{source}:{lineno}: weight {parts[1]!r} is not a number") from None
        if not -1.0 <= weight <= 1.0:
            raise LexiconError(f"{source}:{lineno}: weight {weight} outside [-1, 1]")
        entries[token] = weight
    return Lexicon(entries=entries, negators=frozenset(negators))


def load_lexicon(path) -> Lexicon:
    """Load a lexicon file (UTF-8); see parse_lexicon for the line format."""
    with open(path, encoding="utf-8") as fh:
        return parse_lexicon(fh, source=str(path))


def default_lexicon() -> Lexicon:
    """The bundled ~60-entry lexicon used by interactive mode and the suite."""
    from importlib.resources import files

    text = files("affectspace").joinpath("data/default_lexicon.txt").read_text(encoding="utf-8")
    return parse_lexicon(text.splitlines(), source="default_lexicon.txt")


def frame_to_dict(frame: FaceFrame) -> dict:
    return {"timestamp_ms": frame.timestamp_ms, "valence": frame.valence, "arousal": frame.arousal}


def frame_from_dict(data: Mapping) -> FaceFrame:
    return FaceFrame(
        timestamp_ms=data["timestamp_ms"], valence=data["valence"], arousal=data["arousal"]
    )
