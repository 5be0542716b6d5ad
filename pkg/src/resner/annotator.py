"""Document annotation: scan, resolve overlaps, disambiguate, index.

The annotator never tokenizes.  The compiled lexicon is scanned over
the raw text, matches embedded in larger alphanumeric words are
rejected, overlaps are resolved greedily left-to-right preferring the
longest span (then entry precedence), and surviving ambiguous foci are
handed to the contextual rules, which either supply the reading whose
lexicon entry provides class and concept id, or suppress the match.
Offsets are Unicode character offsets throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .context_rules import ContextRule, disambiguate
from .entities import EntityClass
from .lexicon import CompiledLexicon
from .scanner import RawMatch
from .textutil import is_wordish


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str


@dataclass(frozen=True)
class Annotation:
    """A classified span; ``end`` is exclusive, surface equals the slice."""

    doc_id: str
    start: int
    end: int
    surface: str
    entity_class: EntityClass
    concept_id: str | None = None

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"bad span [{self.start}, {self.end})")
        if len(self.surface) != self.end - self.start:
            raise ValueError("surface length does not match span")

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


def match_boundaries(text: str, span: tuple[int, int]) -> bool:
    """True iff the span is not embedded in a larger alphanumeric word."""
    start, end = span
    if start > 0 and is_wordish(text[start - 1]):
        return False
    if end < len(text) and is_wordish(text[end]):
        return False
    return True


def resolve_overlaps(matches: Sequence[RawMatch]) -> list[RawMatch]:
    """Greedy left-to-right selection of non-overlapping matches.

    At each position the longest span wins, ties go to the entry with
    higher precedence (lower index); every match overlapping a selected
    one is discarded.
    """
    ordered = sorted(matches, key=lambda m: (m[0], m[0] - m[1], m[2]))
    kept: list[RawMatch] = []
    last_end = 0
    for match in ordered:
        if match[0] >= last_end:
            kept.append(match)
            last_end = match[1]
    return kept


def annotate(
    doc: Document, lexicon: CompiledLexicon, rules: Sequence[ContextRule] = ()
) -> list[Annotation]:
    """Annotate one document; output is sorted and non-overlapping."""
    raw = [m for m in lexicon.scan(doc.text) if match_boundaries(doc.text, (m[0], m[1]))]
    rule_list = list(rules)
    annotations: list[Annotation] = []
    for start, end, idx in resolve_overlaps(raw):
        entry = lexicon.entries[idx]
        if entry.ambiguous_focus:
            expansion = disambiguate(doc.text, (start, end), rule_list)
            if expansion is None:
                continue
            target = lexicon.lookup_canonical(expansion)
            if target is None:
                continue
            entity_class, concept_id = target.entity_class, target.concept_id
        else:
            entity_class, concept_id = entry.entity_class, entry.concept_id
        annotations.append(
            Annotation(
                doc_id=doc.doc_id,
                start=start,
                end=end,
                surface=doc.text[start:end],
                entity_class=entity_class,
                concept_id=concept_id,
            )
        )
    return annotations


def index_concepts(annotations: Sequence[Annotation]) -> list[str]:
    """Unique concept ids mentioned, ascending; UNCLEAR never indexes."""
    ids = {
        a.concept_id
        for a in annotations
        if a.entity_class is not EntityClass.UNCLEAR and a.concept_id
    }
    return sorted(ids)
