"""Core lexicon value types shared across the pipeline."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

SOURCES = ("primary", "secondary", "fuzzy")


class UnknownClass(ValueError):
    """An entity class label outside the fixed four-value set."""


class EntityClass(Enum):
    PROTEINAS = "PROTEINAS"
    NORMALIZABLES = "NORMALIZABLES"
    NO_NORMALIZABLES = "NO_NORMALIZABLES"
    UNCLEAR = "UNCLEAR"

    @classmethod
    def from_label(cls, label: str) -> "EntityClass":
        try:
            return cls(label)
        except ValueError:
            raise UnknownClass(f"unknown entity class {label!r}") from None

    @property
    def priority(self) -> int:
        """Secondary sort key: protein entries outrank everything else."""
        return 0 if self is EntityClass.PROTEINAS else 1


@dataclass(frozen=True)
class PrimaryEntity:
    """A canonical term taken directly from the terminology."""

    term: str
    entity_class: EntityClass
    concept_id: str | None = None
    rank: int = 0

    def __post_init__(self):
        if not self.term or self.term != self.term.strip():
            raise ValueError(f"term must be non-empty and stripped: {self.term!r}")
        if self.rank < 0:
            raise ValueError(f"rank must be non-negative: {self.rank}")


@dataclass(frozen=True)
class LexEntry:
    """One matchable pattern bound to a class, a concept id and a rank.

    ``origin`` is the canonical primary term the entry traces back to;
    for primary entries it equals ``pattern``.
    """

    pattern: str
    is_regexp: bool
    entity_class: EntityClass
    concept_id: str | None
    rank: int
    source: str
    ambiguous_focus: bool = False
    origin: str = ""

    def __post_init__(self):
        if not self.pattern:
            raise ValueError("pattern must be non-empty")
        if self.rank < 0:
            raise ValueError(f"rank must be non-negative: {self.rank}")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}: {self.source!r}")
        if not self.origin:
            object.__setattr__(self, "origin", self.pattern)


def precedence_key(entry: LexEntry):
    """Total precedence order over lexicon entries.

    Lower tuples sort first and win ties during overlap resolution:
    explicit rank, then protein-first class priority, then longer
    patterns, with lexicographic fields as the final tie-break so that
    the order is deterministic for any pair of distinct entries.
    """
    return (
        entry.rank,
        entry.entity_class.priority,
        -len(entry.pattern),
        entry.pattern,
        entry.entity_class.value,
        entry.concept_id or "",
        entry.source,
        entry.origin,
        entry.is_regexp,
        entry.ambiguous_focus,
    )
