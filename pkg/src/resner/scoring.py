"""Exact-match scoring for both subtasks, plus a disagreement report.

Entity scoring is micro-averaged over documents with exact span (and,
unless relaxed, class) matching.  UNCLEAR gold annotations never count:
they are removed before matching, and system annotations landing
exactly on a removed UNCLEAR span are discarded as well, counting
neither as hit nor as error.  Concept indexing is scored as per-doc id
set intersection.  The diff report works at the strictest level
(span + class + concept id) and assigns every disagreement to exactly
one category for review.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .annotator import Annotation
from .entities import EntityClass


class CorpusMismatch(ValueError):
    """System output mentions a document the gold corpus does not have."""


@dataclass(frozen=True)
class ScoreReport:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


def format_report(report: ScoreReport, task: str) -> str:
    """Stable text rendering, 5 decimals as in the usual result tables."""
    return (
        f"task       {task}\n"
        f"tp         {report.tp}\n"
        f"fp         {report.fp}\n"
        f"fn         {report.fn}\n"
        f"precision  {report.precision:.5f}\n"
        f"recall     {report.recall:.5f}\n"
        f"f1         {report.f1:.5f}\n"
    )


def _check_docs(gold: Mapping[str, object], sys: Mapping[str, object]) -> None:
    extra = sorted(set(sys) - set(gold))
    if extra:
        raise CorpusMismatch(f"system documents missing from gold corpus: {', '.join(extra)}")


def _filter_unclear(
    gold: Sequence[Annotation], sys: Sequence[Annotation]
) -> tuple[list[Annotation], list[Annotation]]:
    unclear_spans = {a.span for a in gold if a.entity_class is EntityClass.UNCLEAR}
    kept_gold = [a for a in gold if a.entity_class is not EntityClass.UNCLEAR]
    kept_sys = [a for a in sys if a.span not in unclear_spans]
    return kept_gold, kept_sys


def score_ner(
    gold: Mapping[str, Sequence[Annotation]],
    sys: Mapping[str, Sequence[Annotation]],
    offsets_only: bool = False,
) -> ScoreReport:
    """Micro-averaged exact-match entity scoring.

    A true positive shares document, start, end and (unless
    ``offsets_only``) entity class; concept ids are not compared here.
    """
    _check_docs(gold, sys)
    tp = fp = fn = 0
    for doc_id, gold_anns in gold.items():
        kept_gold, kept_sys = _filter_unclear(gold_anns, sys.get(doc_id, ()))

        def key(a: Annotation):
            return (a.start, a.end) if offsets_only else (a.start, a.end, a.entity_class)

        gold_keys = {key(a) for a in kept_gold}
        sys_keys = {key(a) for a in kept_sys}
        tp += len(gold_keys & sys_keys)
        fp += len(sys_keys - gold_keys)
        fn += len(gold_keys - sys_keys)
    return ScoreReport(tp, fp, fn)


def score_indexing(
    gold: Mapping[str, Iterable[str]], sys: Mapping[str, Iterable[str]]
) -> ScoreReport:
    """Micro-averaged concept-id set scoring per document."""
    _check_docs(gold, sys)
    tp = fp = fn = 0
    for doc_id, gold_ids in gold.items():
        gold_set = set(gold_ids)
        sys_set = set(sys.get(doc_id, ()))
        tp += len(gold_set & sys_set)
        fp += len(sys_set - gold_set)
        fn += len(gold_set - sys_set)
    return ScoreReport(tp, fp, fn)


DIFF_CATEGORIES = ("span_mismatch", "class_mismatch", "id_mismatch", "spurious", "missing")


@dataclass(frozen=True)
class DiffRecord:
    category: str
    doc_id: str
    gold: Annotation | None
    sys: Annotation | None

    @property
    def anchor(self) -> tuple[int, int]:
        ann = self.sys or self.gold
        return (ann.start, ann.end)


def _overlaps(a: Annotation, b: Annotation) -> bool:
    return a.start < b.end and b.start < a.end


def diff_report(
    gold: Mapping[str, Sequence[Annotation]],
    sys: Mapping[str, Sequence[Annotation]],
) -> list[DiffRecord]:
    """Categorized disagreements at the span+class+id level.

    Every annotation that is not a strict match lands in exactly one
    record: paired mismatches first (same span but different id, same
    span but different class, overlapping spans), then one-sided
    leftovers (spurious system output, missing gold).
    """
    _check_docs(gold, sys)
    records: list[DiffRecord] = []
    for doc_id in sorted(gold):
        kept_gold, kept_sys = _filter_unclear(gold[doc_id], sys.get(doc_id, ()))
        gold_left = sorted(kept_gold, key=lambda a: a.span)
        sys_left = sorted(kept_sys, key=lambda a: a.span)

        def pair_off(match_fn, category: str | None):
            nonlocal gold_left, sys_left
            remaining_gold = list(gold_left)
            for s in list(sys_left):
                partner = next((g for g in remaining_gold if match_fn(g, s)), None)
                if partner is None:
                    continue
                remaining_gold.remove(partner)
                sys_left.remove(s)
                if category is not None:
                    records.append(DiffRecord(category, doc_id, partner, s))
            gold_left = remaining_gold

        pair_off(
            lambda g, s: g.span == s.span
            and g.entity_class is s.entity_class
            and g.concept_id == s.concept_id,
            None,
        )
        pair_off(
            lambda g, s: g.span == s.span and g.entity_class is s.entity_class,
            "id_mismatch",
        )
        pair_off(lambda g, s: g.span == s.span, "class_mismatch")
        pair_off(_overlaps, "span_mismatch")
        for s in sys_left:
            records.append(DiffRecord("spurious", doc_id, None, s))
        for g in gold_left:
            records.append(DiffRecord("missing", doc_id, g, None))
    records.sort(key=lambda r: (r.doc_id, r.anchor, r.category))
    return records


def diff_to_tsv(records: Sequence[DiffRecord]) -> str:
    """Disagreement records as TSV for spreadsheet review."""

    def side(ann: Annotation | None) -> list[str]:
        if ann is None:
            return ["", "", "", "", ""]
        return [
            str(ann.start),
            str(ann.end),
            ann.surface,
            ann.entity_class.value,
            ann.concept_id or "",
        ]

    lines = [
        "# category\tdoc_id\tgold_start\tgold_end\tgold_surface\tgold_class\tgold_id"
        "\tsys_start\tsys_end\tsys_surface\tsys_class\tsys_id"
    ]
    for r in records:
        lines.append("\t".join([r.category, r.doc_id] + side(r.gold) + side(r.sys)))
    return "\n".join(lines) + "\n"
