"""Restricted regexp dialect: parsing and finite-language enumeration.

The dialect used for lexicon patterns is deliberately small: literal
characters, alternation ``|``, non-capturing groups ``(?: )`` (plain
``( )`` is accepted and treated the same, since backreferences do not
exist), optionality ``?``, character classes ``[- ]`` with ranges and
negation, the dot ``.``, and backslash escapes for punctuation.  There
is no counted repetition; ``{`` is an ordinary character.  ``*`` and
``+`` are recognised by the parser only so that unbounded repetition
can be reported as :class:`InfiniteLanguage` instead of a syntax error.

Matching itself is delegated to :mod:`re` (the dialect is a strict
subset); this module exists to validate patterns against the dialect
and to enumerate the exact, finite set of strings a pattern denotes.

Enumeration builds string sets bottom-up, aborting as soon as any
subexpression denotes more than ``limit`` distinct strings.  Because
every construct of the dialect is non-shrinking (a union is at least as
large as its branches, and string concatenation is cancellative, so
``|AB| >= max(|A|, |B|)``), an oversized subexpression implies an
oversized pattern, which makes the early abort exact rather than a
conservative bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

# Unicode scalar values: all code points minus the surrogate block.
_N_SCALARS = 0x110000 - 0x800

_ESCAPABLE_CONTROLS = {"n": "\n", "t": "\t", "r": "\r"}


class PatternSyntaxError(ValueError):
    """Pattern text does not parse under the dialect."""


class InfiniteLanguage(Exception):
    """The pattern contains unbounded repetition (``*`` or ``+``)."""


class LimitExceeded(Exception):
    """The pattern's finite language has more strings than the limit."""


@dataclass(frozen=True)
class Lit:
    char: str


@dataclass(frozen=True)
class AnyChar:
    pass


@dataclass(frozen=True)
class CharSet:
    chars: frozenset[str]
    negated: bool = False


@dataclass(frozen=True)
class Seq:
    parts: tuple["Node", ...]


@dataclass(frozen=True)
class Alt:
    branches: tuple["Node", ...]


@dataclass(frozen=True)
class Repeat:
    inner: "Node"
    min_count: int
    max_count: int | None  # None = unbounded


Node = Union[Lit, AnyChar, CharSet, Seq, Alt, Repeat]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, message: str) -> "PatternSyntaxError":
        return PatternSyntaxError(f"{message} at offset {self.pos} in pattern {self.text!r}")

    def peek(self) -> str | None:
        return self.text[self.pos] if self.pos < len(self.text) else None

    def take(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        return ch

    def parse(self) -> Node:
        node = self.alternation()
        if self.pos != len(self.text):
            raise self.fail(f"unexpected {self.text[self.pos]!r}")
        return node

    def alternation(self) -> Node:
        branches = [self.sequence()]
        while self.peek() == "|":
            self.take()
            branches.append(self.sequence())
        if len(branches) == 1:
            return branches[0]
        return Alt(tuple(branches))

    def sequence(self) -> Node:
        parts: list[Node] = []
        while True:
            ch = self.peek()
            if ch is None or ch in "|)":
                break
            if ch in "?*+":
                if not parts:
                    raise self.fail(f"quantifier {ch!r} with nothing to repeat")
                self.take()
                parts[-1] = self._quantify(parts[-1], ch)
                continue
            parts.append(self.atom())
        if len(parts) == 1:
            return parts[0]
        return Seq(tuple(parts))

    @staticmethod
    def _quantify(node: Node, op: str) -> Node:
        if op == "?":
            return Repeat(node, 0, 1)
        if op == "*":
            return Repeat(node, 0, None)
        return Repeat(node, 1, None)

    def atom(self) -> Node:
        ch = self.take()
        if ch == "(":
            if self.text.startswith("?:", self.pos):
                self.pos += 2
            elif self.peek() == "?":
                raise self.fail("only (?: ) groups are supported")
            inner = self.alternation()
            if self.peek() != ")":
                raise self.fail("unbalanced '('")
            self.take()
            return inner
        if ch == "[":
            return self.char_class()
        if ch == ".":
            return AnyChar()
        if ch == "\\":
            return Lit(self.escape())
        return Lit(ch)

    def escape(self) -> str:
        if self.peek() is None:
            raise self.fail("trailing backslash")
        ch = self.take()
        if ch in _ESCAPABLE_CONTROLS:
            return _ESCAPABLE_CONTROLS[ch]
        if ch.isalnum():
            raise self.fail(f"escape \\{ch} is not part of the dialect")
        return ch

    def char_class(self) -> CharSet:
        negated = False
        if self.peek() == "^":
            self.take()
            negated = True
        chars: set[str] = set()
        first = True
        while True:
            ch = self.peek()
            if ch is None:
                raise self.fail("unbalanced '['")
            if ch == "]" and not first:
                self.take()
                break
            first = False
            self.take()
            if ch == "\\":
                ch = self.escape()
            # range a-z: '-' between two members, not at either end
            if self.peek() == "-" and self.text[self.pos + 1 : self.pos + 2] not in ("]", ""):
                self.take()
                hi = self.take()
                if hi == "\\":
                    hi = self.escape()
                if ord(hi) < ord(ch):
                    raise self.fail(f"bad range {ch}-{hi}")
                chars.update(chr(c) for c in range(ord(ch), ord(hi) + 1))
            else:
                chars.add(ch)
        return CharSet(frozenset(chars), negated)


def parse_pattern(pattern: str) -> Node:
    """Parse ``pattern`` under the dialect, raising PatternSyntaxError otherwise."""
    return _Parser(pattern).parse()


def _check_finite(node: Node) -> None:
    if isinstance(node, Repeat):
        if node.max_count is None:
            raise InfiniteLanguage(f"unbounded repetition in pattern")
        _check_finite(node.inner)
    elif isinstance(node, Seq):
        for part in node.parts:
            _check_finite(part)
    elif isinstance(node, Alt):
        for branch in node.branches:
            _check_finite(branch)


def _set_size(node: CharSet) -> int:
    return _N_SCALARS - len(node.chars) if node.negated else len(node.chars)


def _scalar_iter():
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        yield chr(cp)


def _language(node: Node, limit: int) -> set[str]:
    if isinstance(node, Lit):
        return {node.char}
    if isinstance(node, AnyChar):
        if _N_SCALARS > limit:
            raise LimitExceeded(f"'.' denotes {_N_SCALARS} strings, limit is {limit}")
        return set(_scalar_iter())
    if isinstance(node, CharSet):
        size = _set_size(node)
        if size > limit:
            raise LimitExceeded(f"character class denotes {size} strings, limit is {limit}")
        if node.negated:
            return {c for c in _scalar_iter() if c not in node.chars}
        return set(node.chars)
    if isinstance(node, Alt):
        out: set[str] = set()
        for branch in node.branches:
            out |= _language(branch, limit)
            if len(out) > limit:
                raise LimitExceeded(f"language exceeds limit {limit}")
        return out
    if isinstance(node, Seq):
        acc = {""}
        for part in node.parts:
            part_lang = _language(part, limit)
            nxt: set[str] = set()
            for prefix in acc:
                for suffix in part_lang:
                    nxt.add(prefix + suffix)
                    if len(nxt) > limit:
                        raise LimitExceeded(f"language exceeds limit {limit}")
            acc = nxt
        return acc
    if isinstance(node, Repeat):
        # only (0,1) survives _check_finite
        inner = _language(node.inner, limit)
        out = inner | {""}
        if len(out) > limit:
            raise LimitExceeded(f"language exceeds limit {limit}")
        return out
    raise TypeError(f"unknown node {node!r}")


def enumerate_pattern(pattern: str, limit: int = 256) -> list[str]:
    """Enumerate the finite language of ``pattern`` in lexicographic order.

    Raises InfiniteLanguage when the pattern contains ``*`` or ``+``,
    LimitExceeded when the language holds more than ``limit`` distinct
    strings, and PatternSyntaxError when the pattern does not parse.
    """
    if limit < 1:
        raise ValueError("limit must be positive")
    node = parse_pattern(pattern)
    _check_finite(node)
    return sorted(_language(node, limit))
