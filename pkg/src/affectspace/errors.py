"""Shared exception hierarchy.

Every failure the package raises deliberately derives from AffectError so
the CLI can map any of them onto a one-line ``ClassName: message`` exit.
"""

from __future__ import annotations


class AffectError(Exception):
    """Base class for all package-defined errors."""


class ConfigError(AffectError):
    """Invalid session configuration (bad stimuli list, top_k, thresholds...)."""


class ProtocolError(AffectError):
    """An engine event arrived in a phase where it is not legal."""

    def __init__(self, message: str, expected: tuple[str, ...] = ()) -> None:
        super().__init__(message)
        self.expected = expected


class ContractError(AffectError):
    """An operation was called outside its stated precondition."""


class EmptyChunkError(AffectError):
    """summarize_chunk received no frames."""


class LexiconError(AffectError):
    """Malformed lexicon file; message carries the offending line number."""


class MissingCueError(AffectError):
    """A scripted backend was asked for a cue the script does not author."""


class ScenarioValidationError(AffectError):
    """A scenario script failed validation against its session config."""


class DuplicateRecordError(AffectError):
    """A (subject, stimulus) association was committed twice in one session."""


class MemoryFormatError(AffectError):
    """A memory file could not be parsed or has an unsupported version."""


class EmptyMemoryError(AffectError):
    """An export was requested for a memory holding no records."""
