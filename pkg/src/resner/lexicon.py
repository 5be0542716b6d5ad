"""Terminology loading and compilation into a scan-ready lexicon.

The primary resource is a 4-column TSV (term, class, concept id, rank).
Compilation derives secondary entries through the transform rules,
marks entries targeted by contextual-rule foci as ambiguous, sorts
everything into a total precedence order and builds the combined
scanner.  The result is immutable and safe to share across threads.

Compiled lexicons are cached on disk as a versioned JSON document keyed
by a fingerprint of the source resources; a fingerprint mismatch on
load signals that preprocessing must be redone.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .entities import EntityClass, LexEntry, PrimaryEntity, UnknownClass, precedence_key
from .scanner import LexiconScanner, RawMatch
from .textutil import simple_fold
from .transform import TransformRule, generate_secondary, looks_like_regexp

log = logging.getLogger(__name__)

CACHE_FORMAT = "resner-lexicon-cache"
CACHE_VERSION = 1


class LexiconFormatError(ValueError):
    """Malformed primary-entity resource."""


class CorruptCache(Exception):
    """Cache file exists but cannot be decoded completely."""


@dataclass(frozen=True)
class StaleCache:
    """Returned by load_cache when the stored fingerprint is outdated."""

    stored: str
    current: str


def load_primary_entities(text: str) -> list[PrimaryEntity]:
    """Parse the primary TSV: term, class, concept_id (may be empty), rank."""
    entries: list[PrimaryEntity] = []
    seen: set[tuple[str, EntityClass]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cells = line.split("\t")
        if len(cells) != 4:
            raise LexiconFormatError(
                f"line {lineno}: expected 4 tab-separated columns, got {len(cells)}"
            )
        term, label, concept_id, rank_text = (c.strip() for c in cells)
        if not term:
            raise LexiconFormatError(f"line {lineno}: empty term")
        try:
            entity_class = EntityClass.from_label(label)
        except UnknownClass:
            raise UnknownClass(f"line {lineno}: unknown entity class {label!r}") from None
        try:
            rank = int(rank_text)
        except ValueError:
            raise LexiconFormatError(f"line {lineno}: rank must be an integer, got {rank_text!r}") from None
        if rank < 0:
            raise LexiconFormatError(f"line {lineno}: rank must be non-negative, got {rank}")
        key = (term, entity_class)
        if key in seen:
            raise LexiconFormatError(f"line {lineno}: duplicate entry {term!r} / {label}")
        seen.add(key)
        entries.append(PrimaryEntity(term, entity_class, concept_id or None, rank))
    return entries


class CompiledLexicon:
    """Immutable, ordered entry list plus its combined scanner.

    Entries are held in total precedence order; the index of an entry
    is its precedence (lower wins).  Equality compares entries and
    fingerprint, which is what cache round-trips must preserve.
    """

    __slots__ = ("entries", "fingerprint", "_scanner", "_canonical_primary")

    def __init__(self, entries: Iterable[LexEntry], fingerprint: str = ""):
        ordered = tuple(sorted(entries, key=precedence_key))
        object.__setattr__(self, "entries", ordered)
        object.__setattr__(self, "fingerprint", fingerprint)
        object.__setattr__(self, "_scanner", LexiconScanner(ordered))
        canonical: dict[str, LexEntry] = {}
        for entry in reversed(ordered):
            if entry.source == "primary" and not entry.is_regexp:
                canonical[simple_fold(entry.pattern)] = entry
        object.__setattr__(self, "_canonical_primary", canonical)

    def __setattr__(self, name, value):
        raise AttributeError("CompiledLexicon is immutable")

    def __eq__(self, other):
        if not isinstance(other, CompiledLexicon):
            return NotImplemented
        return self.entries == other.entries and self.fingerprint == other.fingerprint

    def __hash__(self):
        return hash((self.entries, self.fingerprint))

    def __len__(self):
        return len(self.entries)

    def scan(self, text: str) -> list[RawMatch]:
        """All raw matches of all entries over ``text`` (see scanner module)."""
        return self._scanner.scan(text)

    def lookup_canonical(self, expansion: str) -> LexEntry | None:
        """Resolve a contextual-rule expansion to a primary entry.

        Exact canonical-term match wins; otherwise the expansion may
        name a word prefix of a canonical term ("proteína" selecting
        "proteína C reactiva"), resolved to the highest-precedence
        candidate.  Returns None when nothing in the lexicon matches.
        """
        folded = simple_fold(expansion)
        exact = self._canonical_primary.get(folded)
        if exact is not None:
            return exact
        prefix = folded + " "
        best: LexEntry | None = None
        best_key = None
        for term, entry in self._canonical_primary.items():
            if term.startswith(prefix):
                key = precedence_key(entry)
                if best_key is None or key < best_key:
                    best, best_key = entry, key
        return best

    def finite_strings(self, limit: int = 256) -> dict[str, LexEntry]:
        """Folded surface strings covered by finite entries.

        Literal patterns map to themselves; regexp patterns contribute
        their enumerated language.  Patterns with unbounded or oversized
        languages are skipped.  On collisions the higher-precedence
        entry wins.
        """
        from .patterns import InfiniteLanguage, LimitExceeded, enumerate_pattern

        out: dict[str, LexEntry] = {}
        for entry in self.entries:
            if entry.is_regexp:
                try:
                    surfaces = enumerate_pattern(entry.pattern, limit)
                except (InfiniteLanguage, LimitExceeded):
                    continue
            else:
                surfaces = [entry.pattern]
            for surface in surfaces:
                out.setdefault(simple_fold(surface), entry)
        return out


def inputs_fingerprint(
    primaries: Sequence[PrimaryEntity],
    transforms: Sequence[TransformRule],
    foci: Sequence[str] = (),
) -> str:
    """Deterministic digest of in-memory compilation inputs."""
    payload = json.dumps(
        {
            "primaries": [
                [p.term, p.entity_class.value, p.concept_id, p.rank] for p in primaries
            ],
            "transforms": [[t.rule_id, t.match, t.template, t.priority] for t in transforms],
            "foci": list(foci),
        },
        ensure_ascii=False,
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def resource_fingerprint(*paths: str | Path) -> str:
    """Digest of the raw bytes of the source resource files."""
    digest = hashlib.sha256()
    for path in paths:
        data = Path(path).read_bytes()
        digest.update(str(len(data)).encode("ascii"))
        digest.update(b"\x00")
        digest.update(data)
        digest.update(b"\x01")
    return digest.hexdigest()


def _warn_collisions(entries: Sequence[LexEntry]) -> None:
    by_pattern: dict[tuple[str, bool], set[str | None]] = {}
    for entry in entries:
        by_pattern.setdefault((entry.pattern, entry.is_regexp), set()).add(entry.concept_id)
    collisions = {
        pattern: ids for (pattern, _), ids in by_pattern.items() if len(ids) > 1
    }
    if collisions:
        listing = "; ".join(
            f"{pattern!r} -> {sorted(i or '-' for i in ids)}" for pattern, ids in sorted(collisions.items())
        )
        log.warning("duplicate patterns with differing concept ids (precedence decides): %s", listing)


def _mark_and_synthesize_foci(entries: list[LexEntry], foci: Sequence[str]) -> list[LexEntry]:
    marked: list[LexEntry] = list(entries)
    for focus in foci:
        try:
            focus_rx = re.compile(focus)
        except re.error as exc:
            raise LexiconFormatError(f"focus {focus!r} does not compile: {exc}") from exc
        hit = False
        for i, entry in enumerate(marked):
            matches = (
                entry.pattern == focus
                if entry.is_regexp
                else focus_rx.fullmatch(entry.pattern) is not None
            )
            if matches:
                hit = True
                if not entry.ambiguous_focus:
                    marked[i] = LexEntry(
                        pattern=entry.pattern,
                        is_regexp=entry.is_regexp,
                        entity_class=entry.entity_class,
                        concept_id=entry.concept_id,
                        rank=entry.rank,
                        source=entry.source,
                        ambiguous_focus=True,
                        origin=entry.origin,
                    )
        if not hit:
            # foci absent from the terminology still need to be matchable;
            # class/id never surface because the firing rule decides both.
            marked.append(
                LexEntry(
                    pattern=focus,
                    is_regexp=looks_like_regexp(focus),
                    entity_class=EntityClass.UNCLEAR,
                    concept_id=None,
                    rank=0,
                    source="primary",
                    ambiguous_focus=True,
                    origin=focus,
                )
            )
    return marked


def build_lexicon(
    primaries: Sequence[PrimaryEntity],
    transforms: Sequence[TransformRule],
    foci: Sequence[str] = (),
    extra_entries: Sequence[LexEntry] = (),
    fingerprint: str | None = None,
) -> CompiledLexicon:
    """Compile primaries plus derived secondaries into a CompiledLexicon.

    ``foci`` are the contextual-rule focus fragments; matching entries
    are flagged ambiguous and unmatched foci get synthetic entries.
    ``extra_entries`` lets promoted fuzzy variants join the lexicon.
    """
    entries: list[LexEntry] = []
    for primary in primaries:
        entries.append(
            LexEntry(
                pattern=primary.term,
                is_regexp=False,
                entity_class=primary.entity_class,
                concept_id=primary.concept_id,
                rank=primary.rank,
                source="primary",
                origin=primary.term,
            )
        )
        entries.extend(generate_secondary(primary, list(transforms)))
    entries.extend(extra_entries)
    entries = _mark_and_synthesize_foci(entries, foci)
    _warn_collisions(entries)
    if fingerprint is None:
        fingerprint = inputs_fingerprint(primaries, transforms, foci)
    return CompiledLexicon(entries, fingerprint)


def _entry_to_row(entry: LexEntry) -> list:
    return [
        entry.pattern,
        entry.is_regexp,
        entry.entity_class.value,
        entry.concept_id,
        entry.rank,
        entry.source,
        entry.ambiguous_focus,
        entry.origin,
    ]


def _entry_from_row(row: list) -> LexEntry:
    pattern, is_regexp, label, concept_id, rank, source, ambiguous, origin = row
    return LexEntry(
        pattern=pattern,
        is_regexp=bool(is_regexp),
        entity_class=EntityClass.from_label(label),
        concept_id=concept_id,
        rank=int(rank),
        source=source,
        ambiguous_focus=bool(ambiguous),
        origin=origin,
    )


def save_cache(lexicon: CompiledLexicon, path: str | Path) -> None:
    """Write the compiled lexicon to ``path`` as versioned JSON."""
    doc = {
        "format": CACHE_FORMAT,
        "version": CACHE_VERSION,
        "fingerprint": lexicon.fingerprint,
        "entries": [_entry_to_row(e) for e in lexicon.entries],
    }
    Path(path).write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")


def load_cache(path: str | Path, current_fingerprint: str) -> CompiledLexicon | StaleCache:
    """Load a cached lexicon, or report staleness against the fingerprint.

    Raises CorruptCache for anything that does not decode to a complete,
    well-formed cache document of the supported version.
    """
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptCache(f"{path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != CACHE_FORMAT:
        raise CorruptCache(f"{path}: not a lexicon cache file")
    if doc.get("version") != CACHE_VERSION:
        raise CorruptCache(f"{path}: unsupported cache version {doc.get('version')!r}")
    stored = doc.get("fingerprint")
    if not isinstance(stored, str) or not isinstance(doc.get("entries"), list):
        raise CorruptCache(f"{path}: incomplete cache document")
    if stored != current_fingerprint:
        return StaleCache(stored=stored, current=current_fingerprint)
    try:
        entries = [_entry_from_row(row) for row in doc["entries"]]
    except (ValueError, TypeError) as exc:
        raise CorruptCache(f"{path}: bad entry row: {exc}") from exc
    return CompiledLexicon(entries, stored)
