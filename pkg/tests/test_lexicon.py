from __future__ import annotations

import json
import random
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resner.annotator import Document, annotate
from resner.entities import EntityClass, LexEntry, PrimaryEntity, UnknownClass, precedence_key
from resner.lexicon import (
    CompiledLexicon,
    CorruptCache,
    LexiconFormatError,
    StaleCache,
    build_lexicon,
    inputs_fingerprint,
    load_cache,
    load_primary_entities,
    resource_fingerprint,
    save_cache,
)
from resner.scanner import is_case_sensitive
from resner.textutil import simple_fold


# --- loading -----------------------------------------------------------------


def test_load_primary_basic_mapping():
    (entity,) = load_primary_entities("warfarina\tNORMALIZABLES\t387457003\t10\n")
    assert entity.term == "warfarina"
    assert entity.entity_class is EntityClass.NORMALIZABLES
    assert entity.concept_id == "387457003"
    assert entity.rank == 10


def test_load_primary_unknown_class_reports_line():
    with pytest.raises(UnknownClass, match="line 1"):
        load_primary_entities("x\tDRUGS\t1\t0\n")


def test_load_primary_empty_input():
    assert load_primary_entities("") == []


def test_load_primary_skips_comments_and_blank_lines():
    text = "# header\n\nwarfarina\tNORMALIZABLES\t\t1\n"
    (entity,) = load_primary_entities(text)
    assert entity.concept_id is None


@pytest.mark.parametrize(
    ("text", "error", "message"),
    [
        ("a\tNORMALIZABLES\t1\n", LexiconFormatError, "line 1: expected 4"),
        ("\tNORMALIZABLES\t1\t0\n", LexiconFormatError, "line 1: empty term"),
        ("a\tNORMALIZABLES\t1\tx\n", LexiconFormatError, "line 1: rank"),
        ("a\tNORMALIZABLES\t1\t-2\n", LexiconFormatError, "line 1: rank"),
        ("ok\tUNCLEAR\t\t0\nx\tDRUGS\t1\t0\n", UnknownClass, "line 2"),
        (
            "a\tNORMALIZABLES\t1\t0\na\tNORMALIZABLES\t2\t1\n",
            LexiconFormatError,
            "line 2: duplicate",
        ),
    ],
)
def test_load_primary_errors(text, error, message):
    with pytest.raises(error, match=message):
        load_primary_entities(text)


def test_load_primary_preserves_order():
    text = "b\tUNCLEAR\t\t0\na\tUNCLEAR\t\t0\n"
    assert [e.term for e in load_primary_entities(text)] == ["b", "a"]


# --- building ----------------------------------------------------------------


def test_build_contains_cd13_secondary(lexicon):
    patterns = {(e.pattern, e.is_regexp) for e in lexicon.entries}
    assert ("(?:antígeno )?CD[- ]?13", True) in patterns


def test_build_empty_lexicon_matches_nothing():
    empty = build_lexicon([], [])
    assert empty.entries == ()
    assert empty.scan("warfarina y PCR en sangre") == []


def test_build_single_literal_entry():
    lex = build_lexicon([PrimaryEntity("ácido fólico", EntityClass.NORMALIZABLES, "63718003", 1)], [])
    (entry,) = lex.entries
    assert entry.source == "primary"
    assert entry.pattern == "ácido fólico"
    assert not entry.is_regexp


def test_proteinas_outranks_others_at_equal_rank():
    a = LexEntry("aaaa", False, EntityClass.NORMALIZABLES, "1", 3, "primary")
    b = LexEntry("bbbb", False, EntityClass.PROTEINAS, "2", 3, "primary")
    assert precedence_key(b) < precedence_key(a)


def test_longer_patterns_win_within_class():
    short = LexEntry("CA", False, EntityClass.NORMALIZABLES, "1", 5, "primary")
    long = LexEntry("CA 19,9", False, EntityClass.NORMALIZABLES, "2", 5, "primary")
    assert precedence_key(long) < precedence_key(short)


def test_precedence_is_total_and_deterministic(lexicon):
    keys = [precedence_key(e) for e in lexicon.entries]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)
    shuffled = list(lexicon.entries)
    random.Random(7).shuffle(shuffled)
    assert tuple(sorted(shuffled, key=precedence_key)) == lexicon.entries


def test_foci_marking_and_synthesis(lexicon, context_rules):
    ambiguous = {e.pattern for e in lexicon.entries if e.ambiguous_focus}
    assert ambiguous == {"PCR", "Cr"}
    pcr = next(e for e in lexicon.entries if e.pattern == "PCR")
    assert pcr.entity_class is EntityClass.UNCLEAR  # synthesized, class never surfaces


def test_focus_matching_existing_entry_is_marked():
    primaries = [PrimaryEntity("Cr", EntityClass.NORMALIZABLES, "22566001", 7)]
    lex = build_lexicon(primaries, [], foci=["Cr"])
    entry = next(e for e in lex.entries if e.pattern == "Cr")
    assert entry.ambiguous_focus
    assert entry.concept_id == "22566001"  # original fields retained
    assert sum(e.ambiguous_focus for e in lex.entries) == 1  # nothing synthesized


def test_collision_warning_lists_duplicates(caplog):
    primaries = [
        PrimaryEntity("suero", EntityClass.NORMALIZABLES, "111", 1),
        PrimaryEntity("suero", EntityClass.UNCLEAR, "222", 1),
    ]
    with caplog.at_level("WARNING"):
        build_lexicon(primaries, [])
    assert "suero" in caplog.text


def test_lookup_canonical_exact_and_prefix(lexicon):
    exact = lexicon.lookup_canonical("creatinina")
    assert exact is not None and exact.concept_id == "15373003"
    prefix = lexicon.lookup_canonical("proteína")
    assert prefix is not None and prefix.origin == "proteína C reactiva"
    assert lexicon.lookup_canonical("polimerasa") is None


def test_finite_strings_cover_enumerations(lexicon):
    strings = lexicon.finite_strings()
    assert simple_fold("antígeno CD-13") in strings
    assert "warfarina" in strings
    assert strings["cd13"].origin == "antígeno CD13"


# --- scanner equivalence ------------------------------------------------------


def naive_scan(lexicon: CompiledLexicon, text: str):
    """Per-entry, per-position oracle for the combined scanner."""
    folded = simple_fold(text)
    found = set()
    for idx, entry in enumerate(lexicon.entries):
        if entry.is_regexp:
            flags = 0 if is_case_sensitive(entry.pattern) else re.IGNORECASE
            rx = re.compile(entry.pattern, flags)
            for pos in range(len(text) + 1):
                m = rx.match(text, pos)
                if m and m.end() > m.start():
                    found.add((m.start(), m.end(), idx))
        else:
            if is_case_sensitive(entry.pattern):
                needle, haystack = entry.pattern, text
            else:
                needle, haystack = simple_fold(entry.pattern), folded
            for pos in range(len(text) + 1):
                if haystack.startswith(needle, pos):
                    found.add((pos, pos + len(needle), idx))
    return found


WORDS = [
    "warfarina",
    "Warfarina",
    "WARFARINA",
    "ca",
    "CA",
    "CA 19,9",
    "antígeno CD13",
    "antígeno CD-13",
    "CD 13",
    "cd13",
    "PCR",
    "pcr",
    "Cr",
    "cloruro potásico",
    "amoxicilina+ácido clavulánico",
    "vitaminas",
    "suero casero",
    "y",
    "normal",
    "15 mg/l",
    ",",
    ".",
]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(WORDS), min_size=0, max_size=8), st.randoms())
def test_scanner_equals_naive_union(lexicon, parts, rnd):
    text = " ".join(parts)
    assert set(lexicon.scan(text)) == naive_scan(lexicon, text)


def test_scanner_finds_overlapping_literals():
    lex = build_lexicon(
        [
            PrimaryEntity("ana", EntityClass.UNCLEAR, None, 1),
            PrimaryEntity("anan", EntityClass.UNCLEAR, None, 1),
        ],
        [],
    )
    spans = {(s, e, lex.entries[i].pattern) for s, e, i in lex.scan("banananas")}
    assert (1, 4, "ana") in spans
    assert (3, 6, "ana") in spans
    assert (1, 5, "anan") in spans
    assert (3, 7, "anan") in spans


def test_case_policy_uppercase_patterns_are_exact(lexicon):
    def surfaces(text):
        return {text[s:e] for s, e, _ in lexicon.scan(text)}

    assert "pcr" not in surfaces("pcr normal")  # "PCR" carries uppercase: exact match only
    assert "PCR" in surfaces("PCR normal")
    assert "Warfarina" in surfaces("Warfarina oral")  # lowercase pattern: case-insensitive


# --- cache ---------------------------------------------------------------------


def test_cache_roundtrip_preserves_entries(lexicon, tmp_path):
    path = tmp_path / "lexicon.cache"
    save_cache(lexicon, path)
    loaded = load_cache(path, lexicon.fingerprint)
    assert isinstance(loaded, CompiledLexicon)
    assert loaded.entries == lexicon.entries
    assert loaded == lexicon


def test_cache_stale_after_editing_resources(primaries, transforms, tmp_path):
    lex = build_lexicon(primaries, transforms)
    path = tmp_path / "lexicon.cache"
    save_cache(lex, path)
    edited = list(primaries) + [PrimaryEntity("glucosa", EntityClass.NORMALIZABLES, "67079006", 10)]
    current = inputs_fingerprint(edited, transforms)
    result = load_cache(path, current)
    assert isinstance(result, StaleCache)
    assert result.stored == lex.fingerprint
    assert result.current == current


def test_cache_truncated_file_is_corrupt(lexicon, tmp_path):
    path = tmp_path / "lexicon.cache"
    save_cache(lexicon, path)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) // 2])
    with pytest.raises(CorruptCache):
        load_cache(path, lexicon.fingerprint)


def test_cache_rejects_foreign_json(tmp_path):
    path = tmp_path / "other.json"
    path.write_text(json.dumps({"hello": 1}))
    with pytest.raises(CorruptCache):
        load_cache(path, "x")


def test_cache_rejects_unsupported_version(lexicon, tmp_path):
    path = tmp_path / "lexicon.cache"
    save_cache(lexicon, path)
    doc = json.loads(path.read_text())
    doc["version"] = 99
    path.write_text(json.dumps(doc))
    with pytest.raises(CorruptCache):
        load_cache(path, lexicon.fingerprint)


def test_cache_transparency_for_annotation(lexicon, context_rules, tmp_path):
    path = tmp_path / "lexicon.cache"
    save_cache(lexicon, path)
    loaded = load_cache(path, lexicon.fingerprint)
    docs = [
        Document("d1", "CEA y CA 19,9 normales"),
        Document("d2", "hemograma normal, PCR 15 mg/l"),
        Document("d3", "toma warfarina y cloruro potásico a diario"),
        Document("d4", "PCR de virus JC positiva"),
    ]
    for doc in docs:
        assert annotate(doc, loaded, context_rules) == annotate(doc, lexicon, context_rules)


def test_resource_fingerprint_tracks_file_edits(tmp_path):
    a = tmp_path / "a.tsv"
    b = tmp_path / "b.tsv"
    a.write_text("one")
    b.write_text("two")
    before = resource_fingerprint(a, b)
    assert before == resource_fingerprint(a, b)
    b.write_text("two!")
    assert resource_fingerprint(a, b) != before
