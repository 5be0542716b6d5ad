"""Combined multi-pattern scanner over raw text.

Literal entries go into a single Aho-Corasick automaton built over
case-folded text, which reports every occurrence of every literal in
one pass, including overlapping ones.  Entries whose pattern contains
an uppercase letter are case-sensitive: the automaton still finds the
folded candidate and the original slice is then compared exactly.
Regexp entries are matched at every start position via search-and-skip,
so the combined scan is equivalent to testing each entry independently
at each position (greedy match, zero-width matches dropped).
"""

from __future__ import annotations

import re
from collections import deque
from typing import Iterable, Sequence

from .entities import LexEntry
from .textutil import simple_fold

# (start, end, entry index in precedence order)
RawMatch = tuple[int, int, int]


class PatternCompileError(ValueError):
    """A lexicon regexp entry does not compile."""


def is_case_sensitive(pattern: str) -> bool:
    return any(ch.isupper() for ch in pattern)


class _AhoCorasick:
    """Dictionary automaton over exact strings; finds all occurrences."""

    def __init__(self, patterns: Iterable[str]):
        self._goto: list[dict[str, int]] = [{}]
        self._fail: list[int] = [0]
        self._out: list[list[int]] = [[]]
        self._lengths: list[int] = []
        for idx, pattern in enumerate(patterns):
            self._lengths.append(len(pattern))
            state = 0
            for ch in pattern:
                nxt = self._goto[state].get(ch)
                if nxt is None:
                    nxt = len(self._goto)
                    self._goto.append({})
                    self._fail.append(0)
                    self._out.append([])
                    self._goto[state][ch] = nxt
                state = nxt
            self._out[state].append(idx)
        self._build_failures()

    def _build_failures(self):
        queue: deque[int] = deque()
        for state in self._goto[0].values():
            queue.append(state)
        while queue:
            state = queue.popleft()
            for ch, nxt in self._goto[state].items():
                queue.append(nxt)
                fallback = self._fail[state]
                while fallback and ch not in self._goto[fallback]:
                    fallback = self._fail[fallback]
                self._fail[nxt] = self._goto[fallback].get(ch, 0)
                self._out[nxt] = self._out[nxt] + self._out[self._fail[nxt]]

    def iter_matches(self, text: str):
        """Yield (start, end, pattern_index) for every occurrence."""
        state = 0
        for pos, ch in enumerate(text):
            while state and ch not in self._goto[state]:
                state = self._fail[state]
            state = self._goto[state].get(ch, 0)
            for idx in self._out[state]:
                yield pos + 1 - self._lengths[idx], pos + 1, idx


class LexiconScanner:
    """Scan-ready form of an ordered entry list."""

    def __init__(self, entries: Sequence[LexEntry]):
        folded_to_slot: dict[str, int] = {}
        # slot -> [(entry index, original pattern, case sensitive)]
        self._slot_entries: list[list[tuple[int, str, bool]]] = []
        self._regexps: list[tuple[int, re.Pattern]] = []
        for idx, entry in enumerate(entries):
            if entry.is_regexp:
                flags = 0 if is_case_sensitive(entry.pattern) else re.IGNORECASE
                try:
                    rx = re.compile(entry.pattern, flags)
                except re.error as exc:
                    raise PatternCompileError(
                        f"pattern {entry.pattern!r} (from {entry.origin!r}): {exc}"
                    ) from exc
                self._regexps.append((idx, rx))
            else:
                folded = simple_fold(entry.pattern)
                slot = folded_to_slot.get(folded)
                if slot is None:
                    slot = len(self._slot_entries)
                    folded_to_slot[folded] = slot
                    self._slot_entries.append([])
                self._slot_entries[slot].append(
                    (idx, entry.pattern, is_case_sensitive(entry.pattern))
                )
        self._automaton = _AhoCorasick(folded_to_slot.keys())

    def scan(self, text: str) -> list[RawMatch]:
        """All matches of all entries, in (start, longest-first, precedence) order."""
        matches: set[RawMatch] = set()
        folded = simple_fold(text)
        for start, end, slot in self._automaton.iter_matches(folded):
            surface = text[start:end]
            for idx, original, case_sensitive in self._slot_entries[slot]:
                if not case_sensitive or surface == original:
                    matches.add((start, end, idx))
        for idx, rx in self._regexps:
            pos = 0
            while pos <= len(text):
                m = rx.search(text, pos)
                if m is None:
                    break
                if m.end() > m.start():
                    matches.add((m.start(), m.end(), idx))
                pos = m.start() + 1
        return sorted(matches, key=lambda m: (m[0], m[0] - m[1], m[2]))
