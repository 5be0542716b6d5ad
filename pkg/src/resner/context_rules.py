"""Contextual disambiguation rules for ambiguous foci.

Rule grammar (one rule, whitespace and newlines between tokens are
insignificant; full-line ``#`` comments allowed)::

    rule := lhs '-' '>' '[' 'm=' expansion ']'
    lhs  := ctx? '-' '[' focus ']' '-' ctx?
    ctx  := ('b:')? '[' flags '::' alt ('|' alt)* ']'

Flags are a subset of ``{i, l}``: ``i`` makes context matching
case-insensitive, ``l`` makes it local, i.e. the context must begin or
end within ``window_chars`` characters (default 40) of the nearer focus
edge.  A ``b:`` prefix marks the single given context as bidirectional:
it may be satisfied on either side of the focus.  A rule with no
context at all is a default rule, applicable whenever its focus
matches; contextual rules are always tried before default rules.

Context alternatives are regexp fragments matched at word-start
positions, so stems work: ``leucocit`` matches ``leucocitos`` but not
``xleucocit``.  Distances are measured in characters between the
nearer edges of focus and context match, inclusive of the window.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

DEFAULT_WINDOW = 40

_WORD_START = r"(?<![^\W_])"


class RuleSyntaxError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class ContextSpec:
    alternatives: tuple[str, ...]
    case_insensitive: bool = False
    local: bool = False
    window_chars: int = DEFAULT_WINDOW
    _rx: re.Pattern = field(init=False, repr=False, compare=False)
    _max_len: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.alternatives:
            raise ValueError("context needs at least one alternative")
        if self.window_chars < 1:
            raise ValueError("window_chars must be positive")
        body = "|".join(f"(?:{alt})" for alt in self.alternatives)
        flags = re.IGNORECASE if self.case_insensitive else 0
        try:
            rx = re.compile(_WORD_START + f"(?:{body})", flags)
        except re.error as exc:
            raise ValueError(f"context alternative does not compile: {exc}") from exc
        object.__setattr__(self, "_rx", rx)
        # dialect matches are never longer than their pattern text
        object.__setattr__(self, "_max_len", max(len(a) for a in self.alternatives))

    def matches_side(self, text: str, focus_start: int, focus_end: int, side: str) -> bool:
        """Does this context hold on ``side`` ("left"/"right") of the focus?"""
        if not self.local:
            return self._rx.search(text) is not None
        if side == "left":
            lo = max(0, focus_start - self.window_chars - self._max_len)
            for m in self._rx.finditer(text, lo, focus_start):
                if focus_start - m.end() <= self.window_chars:
                    return True
            return False
        hi = min(len(text), focus_end + self.window_chars + self._max_len)
        for m in self._rx.finditer(text, focus_end, hi):
            if m.start() - focus_end <= self.window_chars:
                return True
        return False


@dataclass(frozen=True)
class ContextRule:
    focus: str
    left: ContextSpec | None
    right: ContextSpec | None
    bidirectional: bool
    expansion: str
    rule_id: int = field(default=0, compare=False)
    _focus_rx: re.Pattern = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.focus:
            raise ValueError("focus must be non-empty")
        if not self.expansion:
            raise ValueError("expansion must be non-empty")
        if self.bidirectional and (self.left is None or self.right is not None):
            raise ValueError("a bidirectional rule carries exactly one context spec")
        try:
            rx = re.compile(self.focus)
        except re.error as exc:
            raise ValueError(f"focus does not compile: {exc}") from exc
        object.__setattr__(self, "_focus_rx", rx)

    @property
    def is_default(self) -> bool:
        return self.left is None and self.right is None

    def applies(self, text: str, focus_start: int, focus_end: int) -> bool:
        if self._focus_rx.fullmatch(text, focus_start, focus_end) is None:
            return False
        if self.is_default:
            return True
        if self.bidirectional:
            spec = self.left
            return spec.matches_side(text, focus_start, focus_end, "left") or spec.matches_side(
                text, focus_start, focus_end, "right"
            )
        if self.left and not self.left.matches_side(text, focus_start, focus_end, "left"):
            return False
        if self.right and not self.right.matches_side(text, focus_start, focus_end, "right"):
            return False
        return True


# --- parsing ---------------------------------------------------------------

_DASH = "DASH"
_ARROW = "ARROW"
_BPREFIX = "BPREFIX"
_GROUP = "GROUP"


def _strip_comments(text: str) -> str:
    kept = []
    for line in text.split("\n"):
        kept.append("" if line.lstrip().startswith("#") else line)
    return "\n".join(kept)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    line = 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            continue
        if ch == "b" and text[i + 1 : i + 2] == ":":
            tokens.append((_BPREFIX, "b:", line))
            i += 2
            continue
        if ch == "-":
            tokens.append((_DASH, "-", line))
            i += 1
            continue
        if ch == ">":
            tokens.append((_ARROW, ">", line))
            i += 1
            continue
        if ch == "[":
            open_line = line
            depth = 1
            j = i + 1
            while j < n and depth:
                cj = text[j]
                if cj == "\\" and j + 1 < n:
                    j += 2
                    continue
                if cj == "\n":
                    line += 1
                elif cj == "[":
                    depth += 1
                elif cj == "]":
                    depth -= 1
                    if not depth:
                        break
                j += 1
            if depth:
                raise RuleSyntaxError("unbalanced bracket", open_line)
            tokens.append((_GROUP, text[i + 1 : j], open_line))
            i = j + 1
            continue
        raise RuleSyntaxError(f"unexpected character {ch!r}", line)
    return tokens


def _split_top(content: str, sep: str) -> list[str]:
    """Split on ``sep`` at bracket depth 0, honoring backslash escapes."""
    parts = []
    depth = 0
    current = []
    i = 0
    while i < len(content):
        ch = content[i]
        if ch == "\\" and i + 1 < len(content):
            current.append(content[i : i + 2])
            i += 2
            continue
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth = max(0, depth - 1)
        if ch == sep and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
        i += 1
    parts.append("".join(current))
    return parts


def _normalize_fragment(fragment: str) -> str:
    return re.sub(r"\s+", " ", fragment).strip()


def _split_sentinel(content: str) -> str:
    # depth-0 view of the content with bracketed spans blanked out,
    # so a '::' inside a character class is not mistaken for the
    # flags separator
    out = []
    depth = 0
    i = 0
    while i < len(content):
        ch = content[i]
        if ch == "\\" and i + 1 < len(content):
            out.append("\x00\x00")
            i += 2
            continue
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth = max(0, depth - 1)
        out.append(ch if depth == 0 and ch not in "[]" else "\x00")
        i += 1
    return "".join(out)


def _parse_context(content: str, line: int, window_chars: int) -> ContextSpec:
    flat = _split_sentinel(content)
    sep = flat.find("::")
    flags_text = content[:sep]
    alts_text = content[sep + 2 :]
    case_insensitive = False
    local = False
    for ch in flags_text:
        if ch.isspace():
            continue
        if ch == "i":
            case_insensitive = True
        elif ch == "l":
            local = True
        else:
            raise RuleSyntaxError(f"unknown flag {ch!r}", line)
    alternatives = []
    for part in _split_top(alts_text, "|"):
        alt = _normalize_fragment(part)
        if not alt:
            raise RuleSyntaxError("empty context alternative", line)
        alternatives.append(alt)
    if not alternatives:
        raise RuleSyntaxError("context needs at least one alternative", line)
    try:
        return ContextSpec(
            alternatives=tuple(alternatives),
            case_insensitive=case_insensitive,
            local=local,
            window_chars=window_chars,
        )
    except ValueError as exc:
        raise RuleSyntaxError(str(exc), line) from None


def _parse_rule(tokens: list[tuple[str, str, int]], rule_id: int, window_chars: int) -> ContextRule:
    first_line = tokens[0][2]
    arrow_at = next((i for i, t in enumerate(tokens) if t[0] == _ARROW), None)
    if arrow_at is None:
        raise RuleSyntaxError("missing '>' action separator", first_line)
    action_tokens = tokens[arrow_at + 1 :]
    if len(action_tokens) != 1 or action_tokens[0][0] != _GROUP:
        raise RuleSyntaxError("missing action group after '>'", tokens[arrow_at][2])
    action = _normalize_fragment(action_tokens[0][1])
    if not action.startswith("m="):
        raise RuleSyntaxError("action must have the form [m=<expansion>]", action_tokens[0][2])
    expansion = action[2:].strip()
    if not expansion:
        raise RuleSyntaxError("empty expansion", action_tokens[0][2])

    # LHS: groups with optional b: prefixes, separated by dashes
    items: list[tuple[bool, str, int]] = []  # (b-prefixed, content, line)
    dashes_after: list[int] = []
    pending_b = False
    pending_b_line = first_line
    for kind, value, line in tokens[:arrow_at]:
        if kind == _BPREFIX:
            if pending_b:
                raise RuleSyntaxError("duplicated 'b:' prefix", line)
            pending_b = True
            pending_b_line = line
        elif kind == _GROUP:
            items.append((pending_b, value, pending_b_line if pending_b else line))
            dashes_after.append(0)
            pending_b = False
        elif kind == _DASH:
            if items:
                dashes_after[-1] += 1
        else:
            raise RuleSyntaxError(f"unexpected token {value!r}", line)
    if pending_b:
        raise RuleSyntaxError("'b:' prefix without a context group", pending_b_line)

    kinds = ["ctx" if "::" in _split_sentinel(content) else "focus" for _, content, _ in items]
    focus_positions = [i for i, kind in enumerate(kinds) if kind == "focus"]
    if not focus_positions:
        raise RuleSyntaxError("missing focus", first_line)
    if len(focus_positions) > 1:
        raise RuleSyntaxError("more than one focus group", items[focus_positions[1]][2])
    focus_at = focus_positions[0]
    _, focus_content, focus_line = items[focus_at]
    if items[focus_at][0]:
        raise RuleSyntaxError("'b:' prefix belongs on a context group", focus_line)
    focus = _normalize_fragment(focus_content)
    if not focus:
        raise RuleSyntaxError("empty focus", focus_line)
    if focus_at > 0 and dashes_after[focus_at - 1] == 0:
        raise RuleSyntaxError("missing '-' before focus", focus_line)
    if dashes_after[focus_at] == 0:
        raise RuleSyntaxError("missing '-' after focus", focus_line)

    left = right = None
    bidirectional = False
    for i, (b_prefixed, content, line) in enumerate(items):
        if kinds[i] != "ctx":
            continue
        spec = _parse_context(content, line, window_chars)
        if b_prefixed:
            bidirectional = True
        if i < focus_at:
            if left is not None:
                raise RuleSyntaxError("more than one left context", line)
            left = spec
        else:
            if right is not None:
                raise RuleSyntaxError("more than one right context", line)
            right = spec
    if bidirectional:
        if (left is None) == (right is None):
            raise RuleSyntaxError("a bidirectional rule carries exactly one context", focus_line)
        if right is not None:
            left, right = right, None
    try:
        return ContextRule(
            focus=focus,
            left=left,
            right=right,
            bidirectional=bidirectional,
            expansion=expansion,
            rule_id=rule_id,
        )
    except ValueError as exc:
        raise RuleSyntaxError(str(exc), focus_line) from None


def parse_rules(text: str, window_chars: int = DEFAULT_WINDOW) -> list[ContextRule]:
    """Parse a rule file into rules in file order.

    ``window_chars`` seeds every local context's window (the run-time
    override of the default 40).
    """
    tokens = _tokenize(_strip_comments(text))
    rules: list[ContextRule] = []
    current: list[tuple[str, str, int]] = []
    expecting_action = False
    for token in tokens:
        current.append(token)
        if token[0] == _ARROW:
            expecting_action = True
        elif expecting_action and token[0] == _GROUP:
            rules.append(_parse_rule(current, len(rules) + 1, window_chars))
            current = []
            expecting_action = False
    if current:
        raise RuleSyntaxError("incomplete rule at end of file", current[0][2])
    return rules


def _spec_text(spec: ContextSpec) -> str:
    flags = ("i" if spec.case_insensitive else "") + ("l" if spec.local else "")
    return f"[{flags}::{'|'.join(spec.alternatives)}]"


def serialize_rule(rule: ContextRule) -> str:
    """Canonical single-line form; parse_rules round-trips it."""
    parts: list[str] = []
    if rule.bidirectional:
        parts.append("b:" + _spec_text(rule.left))
    elif rule.left is not None:
        parts.append(_spec_text(rule.left))
    parts.extend(["-", f"[{rule.focus}]", "-"])
    if rule.right is not None and not rule.bidirectional:
        parts.extend([_spec_text(rule.right), "-"])
    parts.extend([">", f"[m={rule.expansion}]"])
    return " ".join(parts)


def disambiguate(
    text: str, focus_span: tuple[int, int], rules: list[ContextRule]
) -> str | None:
    """Expansion chosen for the focus occupying ``focus_span``, if any.

    Contextual rules are tried before default rules; within each group
    file order decides.  Returns None when no rule applies.
    """
    start, end = focus_span
    ordered = [r for r in rules if not r.is_default] + [r for r in rules if r.is_default]
    for rule in ordered:
        if rule.applies(text, start, end):
            return rule.expansion
    return None
