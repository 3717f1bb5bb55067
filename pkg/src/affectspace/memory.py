"""Persistent affective memory: per-subject, per-stimulus association records.

The on-disk format is a single versioned JSON document (see
``docs: memory file schema`` in the README). Load is atomic: a malformed
or truncated file raises MemoryFormatError and never yields a partial
memory. Scores round-trip exactly (floats are written with full
shortest-repr precision, beyond the 6-significant-digit floor).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Mapping

from .core import EmotionalScores, Zone
from .errors import DuplicateRecordError, MemoryFormatError

MEMORY_FORMAT_VERSION = "1"


@dataclass(frozen=True)
class AssociationRecord:
    """One committed association: where a stimulus landed for a subject.

    ``initial_scores`` is the first asynchronous reaction; ``final_scores``
    is what was committed after any clarification dialogue (identical when
    no extensions ran). ``resolved`` is False only for forced commits at
    the extension cap. ``committed_at`` is the transcript sequence number
    of the committing event, which makes per-subject commit order total.
    """

    subject_id: str
    stimulus_id: str
    category: str
    initial_scores: EmotionalScores
    final_scores: EmotionalScores
    zone_initial: Zone
    zone_final: Zone
    extensions_used: int
    resolved: bool
    rating: int | None
    committed_at: int

    def __post_init__(self) -> None:
        if self.extensions_used < 0:
            raise ValueError(f"extensions_used must be >= 0, got {self.extensions_used}")
        if self.extensions_used == 0 and self.initial_scores != self.final_scores:
            raise ValueError("a record with no extensions must keep its initial scores")
        if self.rating is not None and not 1 <= self.rating <= 5:
            raise ValueError(f"rating must be in 1..5, got {self.rating}")


def record_to_dict(record: AssociationRecord) -> dict:
    return {
        "subject_id": record.subject_id,
        "stimulus_id": record.stimulus_id,
        "category": record.category,
        "initial_scores": {"vision": record.initial_scores.vision, "language": record.initial_scores.language},
        "final_scores": {"vision": record.final_scores.vision, "language": record.final_scores.language},
        "zone_initial": record.zone_initial.value,
        "zone_final": record.zone_final.value,
        "extensions_used": record.extensions_used,
        "resolved": record.resolved,
        "rating": record.rating,
        "committed_at": record.committed_at,
    }


def record_from_dict(data: Mapping) -> AssociationRecord:
    try:
        return AssociationRecord(
            subject_id=data["subject_id"],
            stimulus_id=data["stimulus_id"],
            category=data["category"],
            initial_scores=EmotionalScores(**data["initial_scores"]),
            final_scores=EmotionalScores(**data["final_scores"]),
            zone_initial=Zone(data["zone_initial"]),
            zone_final=Zone(data["zone_final"]),
            extensions_used=data["extensions_used"],
            resolved=data["resolved"],
            rating=data["rating"],
            committed_at=data["committed_at"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MemoryFormatError(f"bad association record: {exc}") from exc


class AffectiveMemory:
    """Map subject -> stimulus -> AssociationRecord, at most one per pair."""

    def __init__(self) -> None:
        self._records: dict[str, dict[str, AssociationRecord]] = {}

    def __len__(self) -> int:
        return sum(len(by_stim) for by_stim in self._records.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AffectiveMemory):
            return NotImplemented
        return self._records == other._records

    def commit(self, record: AssociationRecord) -> None:
        by_stim = self._records.setdefault(record.subject_id, {})
        if record.stimulus_id in by_stim:
            raise DuplicateRecordError(
                f"association for subject {record.subject_id!r} and "
                f"stimulus {record.stimulus_id!r} already committed"
            )
        by_stim[record.stimulus_id] = record

    def get(self, subject_id: str, stimulus_id: str) -> AssociationRecord | None:
        return self._records.get(subject_id, {}).get(stimulus_id)

    def subjects(self) -> list[str]:
        return sorted(self._records)

    def query_subject(self, subject_id: str) -> list[AssociationRecord]:
        """All of one subject's records in commit order (empty for unknown ids)."""
        records = list(self._records.get(subject_id, {}).values())
        records.sort(key=lambda r: r.committed_at)
        return records

    def all_records(self) -> Iterator[AssociationRecord]:
        """Every record, ordered by subject id then commit order."""
        for subject_id in self.subjects():
            yield from self.query_subject(subject_id)

    def to_json_dict(self) -> dict:
        return {
            "version": MEMORY_FORMAT_VERSION,
            "records": [record_to_dict(r) for r in self.all_records()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())


def memory_from_json_dict(data: Mapping) -> AffectiveMemory:
    if not isinstance(data, Mapping):
        raise MemoryFormatError("memory document must be a JSON object")
    version = data.get("version")
    if version != MEMORY_FORMAT_VERSION:
        raise MemoryFormatError(
            f"unsupported memory format version {version!r} (expected {MEMORY_FORMAT_VERSION!r})"
        )
    records = data.get("records")
    if not isinstance(records, list):
        raise MemoryFormatError("memory document has no 'records' list")
    memory = AffectiveMemory()
    for i, item in enumerate(records):
        try:
            memory.commit(record_from_dict(item))
        except (MemoryFormatError, DuplicateRecordError) as exc:
            raise MemoryFormatError(f"record {i}: {exc}") from exc
    return memory


def load_memory(path) -> AffectiveMemory:
    """Parse a memory file; raises MemoryFormatError with position on bad input."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MemoryFormatError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return memory_from_json_dict(data)
