"""Small text helpers shared across the pipeline.

Offsets everywhere in this package are Unicode character offsets, so
any case normalisation used for matching must preserve string length.
"""

from __future__ import annotations

import re

# Maximal runs of letters/digits, allowing internal (not leading or
# trailing) hyphens.  This is the only notion of "word" the pipeline
# has; no tokenizer runs ahead of matching.
WORD_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*")


def simple_fold(text: str) -> str:
    """Length-preserving lowercase fold.

    Characters whose lowercase form expands (e.g. ``İ``) are kept as-is
    so that folded offsets always line up with the original text.
    """
    out = []
    for ch in text:
        low = ch.lower()
        out.append(low if len(low) == 1 else ch)
    return "".join(out)


def is_wordish(ch: str) -> bool:
    """True for characters that can sit inside an alphanumeric word."""
    return ch.isalpha() or ch.isdigit()


def iter_words(text: str):
    """Yield (start, end, surface) for every word run in ``text``."""
    for m in WORD_RE.finditer(text):
        yield m.start(), m.end(), m.group()
