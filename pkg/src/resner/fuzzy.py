"""Offline mining of misspelled entity variants from a background corpus.

Candidate variants are word sequences (1..max_words words, where words
are maximal letter/digit runs with internal hyphens) whose edit
distance to some lexicon string falls within a length-dependent budget.
Exact lexicon matches and common-vocabulary strings are excluded, and
multiword candidates only compete against lexicon strings with the
same word count.  All comparisons are case-folded.  The output is a
reviewable list; accepted variants can then be promoted into literal
lexicon entries that inherit class and concept id from their canonical
string.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .annotator import Document
from .entities import LexEntry
from .textutil import iter_words, simple_fold

DEFAULT_DISTANCE_TABLE = ((4, 1), (8, 2), (13, 3))
MAX_DISTANCE = 3


class AmbiguousPromotion(ValueError):
    """An accepted variant maps to canonicals with different concept ids."""


@dataclass(frozen=True)
class FuzzyParams:
    """Knobs of the variant search.

    ``distance_table`` is a sequence of (min_length, distance) steps in
    ascending order: a candidate of character length L gets the
    distance of the last step with min_length <= L, and 0 below
    ``min_length``.
    """

    max_words: int = 3
    min_length: int = 4
    distance_table: tuple[tuple[int, int], ...] = DEFAULT_DISTANCE_TABLE

    def __post_init__(self):
        if self.max_words < 1:
            raise ValueError("max_words must be positive")
        if self.min_length < 1:
            raise ValueError("min_length must be positive")
        previous = 0
        for min_len, dist in self.distance_table:
            if min_len <= previous:
                raise ValueError("distance_table steps must have ascending lengths")
            previous = min_len
            if not 0 <= dist <= MAX_DISTANCE:
                raise ValueError(f"allowed distance must be 0..{MAX_DISTANCE}, got {dist}")
            if dist > math.ceil(min_len / 4):
                raise ValueError(
                    f"distance {dist} exceeds length/4 rounded up for length {min_len}"
                )


@dataclass(frozen=True)
class FuzzyCandidate:
    variant: str
    canonical: str
    distance: int
    doc_id: str
    occurrence_count: int

    def __post_init__(self):
        if self.distance < 1:
            raise ValueError("candidate distance must be positive")
        if self.occurrence_count < 1:
            raise ValueError("occurrence_count must be positive")


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance over Unicode characters, unit costs."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i] + [0] * len(b)
        for j, cb in enumerate(b, 1):
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            )
        previous = current
    return previous[-1]


def max_distance_for(length: int, params: FuzzyParams) -> int:
    """Allowed edit distance for a candidate of ``length`` characters."""
    if length < params.min_length:
        return 0
    allowed = 0
    for min_len, dist in params.distance_table:
        if length >= min_len:
            allowed = dist
    return allowed


def _word_sequences(text: str, max_words: int):
    """Yield (offset, surface) for every run of 1..max_words words."""
    words = list(iter_words(text))
    for count in range(1, max_words + 1):
        for i in range(len(words) - count + 1):
            start = words[i][0]
            end = words[i + count - 1][1]
            yield start, count, text[start:end]


def scan(
    docs: Sequence[Document],
    lexicon_strings: Iterable[str],
    common_vocab: Iterable[str],
    params: FuzzyParams = FuzzyParams(),
) -> list[FuzzyCandidate]:
    """Mine misspelling candidates from ``docs`` against the lexicon.

    ``lexicon_strings`` should already include the enumerations of
    finite regexp patterns.  Each candidate is reported against its
    nearest canonical string; ties produce one record per canonical.
    Output order is doc order, then first-occurrence offset.
    """
    vocab = {simple_fold(w) for w in common_vocab}
    by_shape: dict[tuple[int, int], list[str]] = {}
    folded_lexicon: set[str] = set()
    for raw in lexicon_strings:
        folded = simple_fold(raw)
        folded_lexicon.add(folded)
        shape = (len(folded.split()), len(folded))
        by_shape.setdefault(shape, []).append(folded)
    for bucket in by_shape.values():
        bucket.sort()

    candidates: list[FuzzyCandidate] = []
    for doc in docs:
        # variant (folded) -> [first offset, surface as first found, count]
        found: dict[str, list] = {}
        order: list[str] = []
        for offset, word_count, surface in _word_sequences(doc.text, params.max_words):
            folded = simple_fold(surface)
            record = found.get(folded)
            if record is not None:
                record[2] += 1
                continue
            found[folded] = [offset, surface, 1]
            order.append(folded)
        for folded in order:
            offset, surface, count = found[folded]
            if folded in folded_lexicon or folded in vocab:
                continue
            allowed = max_distance_for(len(folded), params)
            if allowed < 1:
                continue
            word_count = len(folded.split())
            best = allowed + 1
            nearest: list[str] = []
            for length in range(len(folded) - allowed, len(folded) + allowed + 1):
                for canonical in by_shape.get((word_count, length), ()):
                    dist = edit_distance(folded, canonical)
                    if dist < best:
                        best, nearest = dist, [canonical]
                    elif dist == best:
                        nearest.append(canonical)
            if best > allowed:
                continue
            for canonical in sorted(set(nearest)):
                candidates.append(
                    FuzzyCandidate(
                        variant=surface,
                        canonical=canonical,
                        distance=best,
                        doc_id=doc.doc_id,
                        occurrence_count=count,
                    )
                )
    return candidates


def promote_candidates(
    candidates: Sequence[FuzzyCandidate],
    decisions: Mapping[str, str],
    canonical_index: Mapping[str, LexEntry],
) -> list[LexEntry]:
    """Turn accepted candidates into literal lexicon entries.

    ``canonical_index`` maps canonical (folded) strings to the lexicon
    entries they enumerate from, as produced by
    CompiledLexicon.finite_strings.  A variant whose minimal-distance
    canonicals disagree on concept id raises AmbiguousPromotion.
    """
    by_variant: dict[str, list[FuzzyCandidate]] = {}
    order: list[str] = []
    for candidate in candidates:
        if candidate.variant not in by_variant:
            order.append(candidate.variant)
        by_variant.setdefault(candidate.variant, []).append(candidate)

    promoted: list[LexEntry] = []
    seen: set[str] = set()
    for variant in order:
        if decisions.get(variant) != "accept":
            continue
        if variant in seen:
            continue
        seen.add(variant)
        entries: dict[tuple, LexEntry] = {}
        for candidate in by_variant[variant]:
            entry = canonical_index.get(simple_fold(candidate.canonical))
            if entry is None:
                raise AmbiguousPromotion(
                    f"variant {variant!r}: canonical {candidate.canonical!r} not in index"
                )
            entries[(entry.entity_class, entry.concept_id)] = entry
        if len(entries) > 1:
            choices = ", ".join(
                f"{e.origin}={e.concept_id or '-'}" for e in entries.values()
            )
            raise AmbiguousPromotion(f"variant {variant!r} is ambiguous among: {choices}")
        entry = next(iter(entries.values()))
        promoted.append(
            LexEntry(
                pattern=variant,
                is_regexp=False,
                entity_class=entry.entity_class,
                concept_id=entry.concept_id,
                rank=entry.rank,
                source="fuzzy",
                origin=entry.origin,
            )
        )
    return promoted


def write_candidates(candidates: Sequence[FuzzyCandidate]) -> str:
    """Candidate list as reviewable TSV."""
    lines = ["# variant\tcanonical\tdistance\tdoc_id\tcount"]
    for c in candidates:
        lines.append(f"{c.variant}\t{c.canonical}\t{c.distance}\t{c.doc_id}\t{c.occurrence_count}")
    return "\n".join(lines) + "\n"


def read_candidates(text: str) -> list[FuzzyCandidate]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cells = line.split("\t")
        if len(cells) != 5:
            raise ValueError(f"line {lineno}: expected 5 columns, got {len(cells)}")
        variant, canonical, distance, doc_id, count = cells
        out.append(FuzzyCandidate(variant, canonical, int(distance), doc_id, int(count)))
    return out


def read_decisions(text: str) -> dict[str, str]:
    """Decisions TSV: variant, accept|reject."""
    decisions: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cells = line.split("\t")
        if len(cells) != 2 or cells[1] not in ("accept", "reject"):
            raise ValueError(f"line {lineno}: expected '<variant>\\taccept|reject'")
        decisions[cells[0]] = cells[1]
    return decisions
