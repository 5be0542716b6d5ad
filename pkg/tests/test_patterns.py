from __future__ import annotations

import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resner.patterns import (
    InfiniteLanguage,
    LimitExceeded,
    PatternSyntaxError,
    enumerate_pattern,
)

CD13_PATTERN = "(?:antígeno )?CD[- ]?13"
CD13_STRINGS = {
    "CD13",
    "CD-13",
    "CD 13",
    "antígeno CD13",
    "antígeno CD-13",
    "antígeno CD 13",
}


def test_cd13_enumerates_exactly_six():
    assert set(enumerate_pattern(CD13_PATTERN)) == CD13_STRINGS
    assert len(enumerate_pattern(CD13_PATTERN)) == 6


def test_literal_is_its_own_language():
    assert enumerate_pattern("warfarina") == ["warfarina"]


def test_unbounded_star_is_infinite():
    with pytest.raises(InfiniteLanguage):
        enumerate_pattern("a(b)*")


def test_unbounded_plus_is_infinite():
    with pytest.raises(InfiniteLanguage):
        enumerate_pattern("ab+")


def test_limit_exceeded_on_large_class_product():
    with pytest.raises(LimitExceeded):
        enumerate_pattern("[abc][abc][abc]", limit=10)
    assert len(enumerate_pattern("[abc][abc][abc]", limit=27)) == 27


def test_dot_exceeds_practical_limits():
    with pytest.raises(LimitExceeded):
        enumerate_pattern("a.c")


def test_negated_class_exceeds_practical_limits():
    with pytest.raises(LimitExceeded):
        enumerate_pattern("[^a]")


def test_alternation_and_optional_groups():
    assert enumerate_pattern("(?:a|b)(?:c|d)?") == ["a", "ac", "ad", "b", "bc", "bd"]


def test_escapes_are_literal():
    assert enumerate_pattern(r"a\.b") == ["a.b"]
    assert enumerate_pattern(r"\?") == ["?"]
    assert enumerate_pattern(r"ac\. x") == ["ac. x"]


def test_class_ranges_and_literal_hyphen():
    assert enumerate_pattern("[a-c]") == ["a", "b", "c"]
    assert enumerate_pattern("[- ]") == [" ", "-"]
    assert enumerate_pattern("[x-]") == ["-", "x"]


def test_leading_close_bracket_is_member():
    assert enumerate_pattern("[]x]") == ["]", "x"]


def test_enumeration_is_lexicographic_and_stable():
    first = enumerate_pattern(CD13_PATTERN)
    assert first == sorted(first)
    assert first == enumerate_pattern(CD13_PATTERN)


@pytest.mark.parametrize(
    "bad",
    ["(?:a", "[ab", "a)", "?a", "\\", "(?=x)", "a|*", "[b-a]", r"\d"],
)
def test_syntax_errors(bad):
    with pytest.raises(PatternSyntaxError):
        enumerate_pattern(bad)


def test_limit_must_be_positive():
    with pytest.raises(ValueError):
        enumerate_pattern("a", limit=0)


# --- property: enumeration agrees with the regexp engine ---------------------
#
# Patterns are built from a tiny AST over {a, b} so that the full
# language fits in a brute-force sweep: every string over {a, b} up to
# the pattern's maximal length, membership decided by re.fullmatch.

_leaf = st.sampled_from(["a", "b", "[ab]", "a?", "b?"])


def _combine(children):
    return st.one_of(
        st.tuples(children, children).map(lambda ab: f"(?:{ab[0]})(?:{ab[1]})"),
        st.tuples(children, children).map(lambda ab: f"(?:{ab[0]}|{ab[1]})"),
        children.map(lambda a: f"(?:{a})?"),
    )


pattern_st = st.recursive(_leaf, _combine, max_leaves=5)


def _max_len(pattern: str) -> int:
    # every atom contributes at most one character per occurrence
    return sum(1 for ch in pattern if ch in "ab")


def _all_strings_up_to(length: int):
    frontier = [""]
    yield ""
    for _ in range(length):
        frontier = [s + c for s in frontier for c in "ab"]
        yield from frontier


@settings(max_examples=200)
@given(pattern_st)
def test_enumeration_matches_brute_force(pattern):
    enumerated = enumerate_pattern(pattern, limit=4096)
    assert enumerated == sorted(enumerated)
    assert len(set(enumerated)) == len(enumerated)
    rx = re.compile(pattern)
    oracle = {s for s in _all_strings_up_to(_max_len(pattern)) if rx.fullmatch(s)}
    assert set(enumerated) == oracle
