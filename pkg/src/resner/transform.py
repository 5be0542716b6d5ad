"""Secondary-entity generation: declarative string-to-regexp rewrites.

A transform rule rewrites a canonical term into a derived pattern.  The
``match`` side is a full Python regexp (with capture groups) applied to
the canonical term; the ``template`` side uses :func:`re.sub`
replacement syntax (``\\1`` group references) and may emit metacharacters
of the restricted pattern dialect, turning a plain string into a regexp
that covers several textual realizations at once.  Outputs containing
no metacharacters stay literal entries.

Rules live in a 4-column TSV resource (id, match, template, priority)
so the inventory can grow without code changes.  Plural variants are
generated here as well, with the minimal Spanish rule: single-token
literal patterns ending in a vowel take ``s``, those ending in a
consonant take ``es``; anything else is left alone.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .entities import LexEntry, PrimaryEntity
from .patterns import (  # noqa: F401  (re-exported: enumeration belongs to this surface)
    InfiniteLanguage,
    LimitExceeded,
    PatternSyntaxError,
    enumerate_pattern,
    parse_pattern,
)

_METACHARS = set("()[]?|.\\*+")
_VOWELS = set("aeiouáéíóúü")


class TransformError(ValueError):
    """A rule failed to compile or produced an uncompilable pattern."""


@dataclass(frozen=True)
class TransformRule:
    rule_id: str
    match: str
    template: str
    priority: int
    _rx: re.Pattern = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        try:
            rx = re.compile(self.match)
        except re.error as exc:
            raise TransformError(f"rule {self.rule_id!r}: bad match regexp: {exc}") from exc
        object.__setattr__(self, "_rx", rx)


def load_transform_rules(text: str) -> list[TransformRule]:
    """Parse the transform-rule TSV (id, match, template, priority)."""
    rules = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\n\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cells = line.split("\t")
        if len(cells) != 4:
            raise TransformError(f"line {lineno}: expected 4 tab-separated columns, got {len(cells)}")
        rule_id, match, template, prio = (c.strip() for c in cells)
        if not rule_id or not match or not template:
            raise TransformError(f"line {lineno}: id, match and template must be non-empty")
        if rule_id in seen:
            raise TransformError(f"line {lineno}: duplicate rule id {rule_id!r}")
        seen.add(rule_id)
        try:
            priority = int(prio)
        except ValueError:
            raise TransformError(f"line {lineno}: priority must be an integer, got {prio!r}") from None
        try:
            rules.append(TransformRule(rule_id, match, template, priority))
        except TransformError as exc:
            raise TransformError(f"line {lineno}: {exc}") from None
    return rules


def looks_like_regexp(pattern: str) -> bool:
    """Heuristic: a derived pattern is a regexp iff it uses metacharacters."""
    return any(ch in _METACHARS for ch in pattern)


def apply_transform(rule: TransformRule, term: str) -> list[str]:
    """Apply one rule to a canonical term.

    Non-matching rules yield nothing; outputs identical to the input
    term are dropped.
    """
    if not rule._rx.search(term):
        return []
    try:
        derived = rule._rx.sub(rule.template, term)
    except re.error as exc:
        raise TransformError(f"rule {rule.rule_id!r} on term {term!r}: bad template: {exc}") from exc
    if derived == term or not derived:
        return []
    return [derived]


def pluralize(token: str) -> str | None:
    """Minimal Spanish plural for a single letter-final token, else None."""
    last = token[-1].lower() if token else ""
    if not last.isalpha():
        return None
    if last in _VOWELS:
        return token + "s"
    return token + "es"


def _validated(pattern: str, rule_id: str, term: str) -> tuple[str, bool]:
    is_regexp = looks_like_regexp(pattern)
    if is_regexp:
        try:
            parse_pattern(pattern)
            re.compile(pattern)
        except (PatternSyntaxError, re.error) as exc:
            raise TransformError(
                f"rule {rule_id!r} on term {term!r} produced uncompilable pattern {pattern!r}: {exc}"
            ) from exc
    return pattern, is_regexp


def generate_secondary(entry: PrimaryEntity, rules: list[TransformRule]) -> list[LexEntry]:
    """Derive the secondary entries of one primary entity.

    Every derived entry inherits class, concept id and rank from the
    primary and records it as its origin.  Identical derived patterns
    are deduplicated keeping the first (highest-precedence) occurrence.
    """
    derived: list[tuple[str, bool]] = []
    for rule in sorted(rules, key=lambda r: r.priority):
        for pattern in apply_transform(rule, entry.term):
            derived.append(_validated(pattern, rule.rule_id, entry.term))

    # plurals of the term and of rule-derived literals, never of plurals
    plural_sources = [entry.term] + [p for p, is_regexp in derived if not is_regexp]
    for token in plural_sources:
        if len(token.split()) == 1:
            plural = pluralize(token)
            if plural is not None:
                derived.append((plural, False))

    out: list[LexEntry] = []
    seen: set[str] = set()
    for pattern, is_regexp in derived:
        if pattern == entry.term or pattern in seen:
            continue
        seen.add(pattern)
        out.append(
            LexEntry(
                pattern=pattern,
                is_regexp=is_regexp,
                entity_class=entry.entity_class,
                concept_id=entry.concept_id,
                rank=entry.rank,
                source="secondary",
                origin=entry.term,
            )
        )
    return out
