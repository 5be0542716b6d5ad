"""Standoff annotation I/O: .ann entity/note records and index lists.

Entity records carry class and character offsets; concept ids travel in
companion AnnotatorNotes records so the files stay loadable in common
annotation viewers::

    T1\tNORMALIZABLES 10 19\twarfarina
    #1\tAnnotatorNotes T1\t387457003

Files are UTF-8 with LF endings on output; CRLF is tolerated on input.
"""

from __future__ import annotations

import re
from pathlib import Path

from .annotator import Annotation, Document
from .entities import EntityClass

_T_RE = re.compile(r"T(\d+)\t(\S+) (\d+) (\d+)\t(.*)")
_NOTE_RE = re.compile(r"#(\d+)\tAnnotatorNotes T(\d+)\t(.+)")


class AnnFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.message = message
        self.line = line


class DanglingNote(AnnFormatError):
    """A note references a T-record that does not exist."""


class SliceMismatch(AnnFormatError):
    """Recorded surface differs from the document slice at its offsets."""


def parse_ann(content: str, doc_text: str | None = None, doc_id: str = "") -> list[Annotation]:
    """Parse .ann content into annotations (file order).

    When ``doc_text`` is given, every record's surface is checked
    against the document slice at its offsets.
    """
    spans: dict[int, tuple[int, Annotation]] = {}  # tid -> (file position, annotation)
    notes: list[tuple[int, str, int]] = []  # (tid, concept id, line)
    for lineno, raw in enumerate(content.replace("\r\n", "\n").split("\n"), 1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        if line.startswith("T"):
            m = _T_RE.fullmatch(line)
            if m is None:
                raise AnnFormatError(f"malformed entity record: {line!r}", lineno)
            tid, label, start_s, end_s, surface = m.groups()
            tid = int(tid)
            if tid in spans:
                raise AnnFormatError(f"duplicate record T{tid}", lineno)
            start, end = int(start_s), int(end_s)
            try:
                entity_class = EntityClass.from_label(label)
            except ValueError as exc:
                raise AnnFormatError(str(exc), lineno) from None
            if start >= end:
                raise AnnFormatError(f"bad span {start}..{end}", lineno)
            if doc_text is not None:
                if end > len(doc_text):
                    raise AnnFormatError(
                        f"span {start}..{end} beyond document end ({len(doc_text)})", lineno
                    )
                if doc_text[start:end] != surface:
                    raise SliceMismatch(
                        f"surface {surface!r} != document slice {doc_text[start:end]!r}", lineno
                    )
            try:
                ann = Annotation(doc_id, start, end, surface, entity_class)
            except ValueError as exc:
                raise AnnFormatError(str(exc), lineno) from None
            spans[tid] = (len(spans), ann)
        elif line.startswith("#"):
            m = _NOTE_RE.fullmatch(line)
            if m is None:
                raise AnnFormatError(f"malformed note record: {line!r}", lineno)
            _, target, concept_id = m.groups()
            notes.append((int(target), concept_id.strip(), lineno))
        else:
            raise AnnFormatError(f"unknown record type: {line!r}", lineno)

    with_ids: dict[int, str] = {}
    for tid, concept_id, lineno in notes:
        if tid not in spans:
            raise DanglingNote(f"note references missing record T{tid}", lineno)
        if tid in with_ids:
            raise AnnFormatError(f"duplicate note for T{tid}", lineno)
        with_ids[tid] = concept_id

    out: list[Annotation] = []
    for tid, (position, ann) in sorted(spans.items(), key=lambda kv: kv[1][0]):
        concept_id = with_ids.get(tid)
        if concept_id is not None:
            ann = Annotation(ann.doc_id, ann.start, ann.end, ann.surface, ann.entity_class, concept_id)
        out.append(ann)
    return out


def write_ann(annotations: list[Annotation]) -> str:
    """Render annotations as .ann content (pre: sorted, non-overlapping)."""
    previous_end = 0
    previous_span = (-1, -1)
    for ann in annotations:
        if ann.span < previous_span or ann.start < previous_end:
            raise ValueError("annotations must be sorted and non-overlapping")
        if "\n" in ann.surface or "\t" in ann.surface:
            raise ValueError(f"surface not representable in .ann: {ann.surface!r}")
        previous_end, previous_span = ann.end, ann.span
    lines = [
        f"T{i}\t{ann.entity_class.value} {ann.start} {ann.end}\t{ann.surface}"
        for i, ann in enumerate(annotations, 1)
    ]
    note_number = 0
    for i, ann in enumerate(annotations, 1):
        if ann.concept_id is not None:
            note_number += 1
            lines.append(f"#{note_number}\tAnnotatorNotes T{i}\t{ann.concept_id}")
    return "".join(line + "\n" for line in lines)


def write_index(doc_id: str, ids: list[str]) -> str:
    """Concept-index lines for one document, ids ascending."""
    return "".join(f"{doc_id}\t{concept_id}\n" for concept_id in sorted(ids))


def read_index_tsv(text: str) -> dict[str, list[str]]:
    """Inverse of concatenated write_index output."""
    index: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cells = line.split("\t")
        if len(cells) != 2:
            raise ValueError(f"line {lineno}: expected 'doc_id\\tconcept_id'")
        index.setdefault(cells[0], []).append(cells[1])
    return index


def read_text_dir(path: str | Path) -> list[Document]:
    """Load a corpus directory of <doc_id>.txt files, sorted by doc id."""
    docs = []
    for txt in sorted(Path(path).glob("*.txt")):
        docs.append(Document(doc_id=txt.stem, text=txt.read_text(encoding="utf-8")))
    return docs


def read_ann_dir(path: str | Path) -> dict[str, list[Annotation]]:
    """Load annotations for a corpus directory.

    Document ids come from *.txt and *.ann stems; a document without an
    .ann file maps to no annotations.  Paired text files are used to
    validate offsets.
    """
    root = Path(path)
    doc_ids = {p.stem for p in root.glob("*.txt")} | {p.stem for p in root.glob("*.ann")}
    corpus: dict[str, list[Annotation]] = {}
    for doc_id in sorted(doc_ids):
        ann_path = root / f"{doc_id}.ann"
        txt_path = root / f"{doc_id}.txt"
        doc_text = txt_path.read_text(encoding="utf-8") if txt_path.exists() else None
        if ann_path.exists():
            try:
                corpus[doc_id] = parse_ann(ann_path.read_text(encoding="utf-8"), doc_text, doc_id)
            except AnnFormatError as exc:
                raise AnnFormatError(f"{ann_path.name}: {exc.message}", exc.line) from None
        else:
            corpus[doc_id] = []
    return corpus
