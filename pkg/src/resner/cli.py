"""Command-line pipeline: compile, annotate, fuzzy-scan, eval, check-rules.

All logging goes to stderr; file and stdout output is data only.
Exit codes: 0 success, 1 input/usage errors, 2 internal errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import brat, fuzzy, lexicon as lexmod
from .annotator import Document, annotate, index_concepts
from .context_rules import DEFAULT_WINDOW, ContextRule, RuleSyntaxError, parse_rules
from .lexicon import CompiledLexicon, CorruptCache, StaleCache
from .scoring import CorpusMismatch, diff_report, diff_to_tsv, format_report, score_indexing, score_ner
from .transform import TransformError

log = logging.getLogger("resner")

DEFAULT_LIMIT = 256


class InputError(Exception):
    """User-facing problem with arguments or input files."""


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the contract here is exit 1 for
    # any input problem, reserving 2 for internal errors.
    def error(self, message):
        raise _UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    """Resolved resource paths and knobs for a pipeline run."""

    primary: Path
    transforms: Path
    rules: Path
    cache: Path | None
    window_chars: int = DEFAULT_WINDOW
    limit: int = DEFAULT_LIMIT
    jobs: int = 1

    def __post_init__(self):
        for path in (self.primary, self.transforms, self.rules):
            if not path.is_file():
                raise InputError(f"input file not found: {path}")
        if self.window_chars < 1:
            raise InputError("--window must be positive")
        if self.limit < 1:
            raise InputError("--limit must be positive")
        if self.jobs < 1:
            raise InputError("--jobs must be positive")


def _build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="resner", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    resources = argparse.ArgumentParser(add_help=False)
    resources.add_argument("--primary", required=True, help="primary entities TSV")
    resources.add_argument("--transforms", required=True, help="transform rules TSV")
    resources.add_argument("--rules", required=True, help="contextual rule file")
    resources.add_argument("--cache", help="lexicon cache file")
    resources.add_argument("--window", type=int, default=DEFAULT_WINDOW,
                           help=f"local context window in characters (default {DEFAULT_WINDOW})")
    resources.add_argument("--limit", type=int, default=DEFAULT_LIMIT,
                           help=f"pattern enumeration cap (default {DEFAULT_LIMIT})")
    resources.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                           help="worker threads for per-document work")

    p = sub.add_parser("compile", parents=[resources],
                       help="build the lexicon and save the cache")
    p = sub.add_parser("annotate", parents=[resources],
                       help="annotate a corpus directory of .txt files")
    p.add_argument("--corpus", required=True, help="directory with <doc_id>.txt files")
    p.add_argument("--out", required=True, help="output directory for .ann files and index.tsv")
    p = sub.add_parser("fuzzy-scan", parents=[resources],
                       help="mine misspelling candidates from a background corpus")
    p.add_argument("--corpus", required=True, help="directory with <doc_id>.txt files")
    p.add_argument("--vocab", required=True, help="common vocabulary list, one word per line")
    p.add_argument("--out", required=True, help="candidates TSV output path")
    p.add_argument("--max-words", type=int, default=3)
    p.add_argument("--min-length", type=int, default=4)
    p = sub.add_parser("eval", help="score system output against gold")
    p.add_argument("--task", choices=("ner", "index"), required=True)
    p.add_argument("--gold", required=True, help=".ann directory (or index TSV for --task index)")
    p.add_argument("--sys", required=True, help=".ann directory (or index TSV for --task index)")
    p.add_argument("--offsets-only", action="store_true",
                   help="ignore entity class when matching spans")
    p.add_argument("--diff", help="write categorized disagreements to this TSV")
    p = sub.add_parser("check-rules", help="validate a contextual rule file")
    p.add_argument("--rules", required=True)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    return parser


def _load_rules(path: Path, window_chars: int) -> list[ContextRule]:
    try:
        return parse_rules(path.read_text(encoding="utf-8"), window_chars)
    except RuleSyntaxError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _compile_resources(cfg: RunConfig) -> tuple[CompiledLexicon, list[ContextRule]]:
    """Load the lexicon through the cache if possible, else rebuild."""
    rules = _load_rules(cfg.rules, cfg.window_chars)
    fingerprint = lexmod.resource_fingerprint(cfg.primary, cfg.transforms, cfg.rules)
    if cfg.cache and cfg.cache.is_file():
        try:
            cached = lexmod.load_cache(cfg.cache, fingerprint)
        except CorruptCache as exc:
            log.warning("corrupt cache, rebuilding: %s", exc)
        else:
            if isinstance(cached, StaleCache):
                log.info("cache stale (resources edited), rebuilding")
            else:
                log.info("cache hit (%s), skipping rebuild", fingerprint[:12])
                return cached, rules

    try:
        primaries = lexmod.load_primary_entities(cfg.primary.read_text(encoding="utf-8"))
    except (lexmod.LexiconFormatError, lexmod.UnknownClass) as exc:
        raise InputError(f"{cfg.primary}: {exc}") from exc
    try:
        transforms = lexmod.load_transform_rules(cfg.transforms.read_text(encoding="utf-8"))
    except TransformError as exc:
        raise InputError(f"{cfg.transforms}: {exc}") from exc
    foci = [rule.focus for rule in rules]
    try:
        compiled = lexmod.build_lexicon(primaries, transforms, foci=foci, fingerprint=fingerprint)
    except TransformError as exc:
        raise InputError(str(exc)) from exc
    secondary = sum(1 for e in compiled.entries if e.source == "secondary")
    log.info(
        "compiled lexicon: %d primary entities, %d secondary entities, %d entries total",
        len(primaries), secondary, len(compiled),
    )
    if cfg.cache:
        lexmod.save_cache(compiled, cfg.cache)
        log.info("cache written to %s", cfg.cache)
    return compiled, rules


def _config(args) -> RunConfig:
    return RunConfig(
        primary=Path(args.primary),
        transforms=Path(args.transforms),
        rules=Path(args.rules),
        cache=Path(args.cache) if args.cache else None,
        window_chars=args.window,
        limit=args.limit,
        jobs=args.jobs,
    )


def _cmd_compile(args) -> int:
    _compile_resources(_config(args))
    return 0


def _read_corpus(path: str) -> list[Document]:
    corpus_dir = Path(path)
    if not corpus_dir.is_dir():
        raise InputError(f"corpus directory not found: {corpus_dir}")
    docs = brat.read_text_dir(corpus_dir)
    if not docs:
        log.warning("no .txt documents under %s", corpus_dir)
    return docs


def _cmd_annotate(args) -> int:
    cfg = _config(args)
    compiled, rules = _compile_resources(cfg)
    docs = _read_corpus(args.corpus)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def work(doc: Document):
        return doc.doc_id, annotate(doc, compiled, rules)

    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        results = dict(pool.map(work, docs))
    index_lines: list[str] = []
    for doc in docs:
        annotations = results[doc.doc_id]
        (out_dir / f"{doc.doc_id}.ann").write_text(brat.write_ann(annotations), encoding="utf-8")
        index_lines.append(brat.write_index(doc.doc_id, index_concepts(annotations)))
    (out_dir / "index.tsv").write_text("".join(index_lines), encoding="utf-8")
    log.info("annotated %d documents into %s", len(docs), out_dir)
    return 0


def _cmd_fuzzy_scan(args) -> int:
    cfg = _config(args)
    compiled, _ = _compile_resources(cfg)
    docs = _read_corpus(args.corpus)
    vocab_path = Path(args.vocab)
    if not vocab_path.is_file():
        raise InputError(f"vocabulary file not found: {vocab_path}")
    vocab = {
        line.strip()
        for line in vocab_path.read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    }
    params = fuzzy.FuzzyParams(max_words=args.max_words, min_length=args.min_length)
    strings = compiled.finite_strings(cfg.limit)
    candidates = fuzzy.scan(docs, strings.keys(), vocab, params)
    Path(args.out).write_text(fuzzy.write_candidates(candidates), encoding="utf-8")
    log.info("%d candidates written to %s", len(candidates), args.out)
    return 0


def _index_corpus(path: str) -> dict[str, list[str]]:
    p = Path(path)
    if p.is_file():
        return brat.read_index_tsv(p.read_text(encoding="utf-8"))
    if p.is_dir():
        return {
            doc_id: index_concepts(annotations)
            for doc_id, annotations in brat.read_ann_dir(p).items()
        }
    raise InputError(f"not a directory or TSV file: {path}")


def _cmd_eval(args) -> int:
    try:
        if args.task == "ner":
            gold = brat.read_ann_dir(_existing_dir(args.gold))
            sys_out = brat.read_ann_dir(_existing_dir(args.sys))
            report = score_ner(gold, sys_out, offsets_only=args.offsets_only)
        else:
            gold = _index_corpus(args.gold)
            sys_out = _index_corpus(args.sys)
            report = score_indexing(gold, sys_out)
    except (brat.AnnFormatError, CorpusMismatch, ValueError) as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(format_report(report, args.task))
    if args.diff:
        if args.task != "ner":
            raise InputError("--diff is only available for --task ner")
        Path(args.diff).write_text(diff_to_tsv(diff_report(gold, sys_out)), encoding="utf-8")
        log.info("diff written to %s", args.diff)
    return 0


def _existing_dir(path: str) -> Path:
    p = Path(path)
    if not p.is_dir():
        raise InputError(f"directory not found: {path}")
    return p


def _cmd_check_rules(args) -> int:
    rules_path = Path(args.rules)
    if not rules_path.is_file():
        raise InputError(f"rule file not found: {rules_path}")
    rules = _load_rules(rules_path, args.window)
    contextual = sum(1 for r in rules if not r.is_default)
    sys.stdout.write(f"{len(rules)} rules ({contextual} contextual, {len(rules) - contextual} default)\n")
    return 0


_COMMANDS = {
    "compile": _cmd_compile,
    "annotate": _cmd_annotate,
    "fuzzy-scan": _cmd_fuzzy_scan,
    "eval": _cmd_eval,
    "check-rules": _cmd_check_rules,
}


def run(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except InputError as exc:
        log.error("%s", exc)
        return 1
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except Exception:  # noqa: BLE001  (CLI boundary: report and exit 2)
        log.exception("internal error")
        return 2


def main() -> None:
    sys.exit(run())
