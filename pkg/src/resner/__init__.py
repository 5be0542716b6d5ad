"""Resource-based named-entity annotation and concept indexing for clinical text."""

from .annotator import Annotation, Document, annotate, index_concepts, match_boundaries, resolve_overlaps
from .context_rules import ContextRule, ContextSpec, RuleSyntaxError, disambiguate, parse_rules, serialize_rule
from .entities import EntityClass, LexEntry, PrimaryEntity, UnknownClass, precedence_key
from .fuzzy import (
    AmbiguousPromotion,
    FuzzyCandidate,
    FuzzyParams,
    edit_distance,
    max_distance_for,
    promote_candidates,
)
from .lexicon import (
    CompiledLexicon,
    CorruptCache,
    LexiconFormatError,
    StaleCache,
    build_lexicon,
    load_cache,
    load_primary_entities,
    resource_fingerprint,
    save_cache,
)
from .patterns import InfiniteLanguage, LimitExceeded, PatternSyntaxError, enumerate_pattern
from .scoring import ScoreReport, diff_report, score_indexing, score_ner
from .transform import TransformError, TransformRule, apply_transform, generate_secondary, load_transform_rules

__version__ = "0.1.0"

__all__ = [
    "AmbiguousPromotion",
    "Annotation",
    "CompiledLexicon",
    "ContextRule",
    "ContextSpec",
    "CorruptCache",
    "Document",
    "EntityClass",
    "FuzzyCandidate",
    "FuzzyParams",
    "InfiniteLanguage",
    "LexEntry",
    "LexiconFormatError",
    "LimitExceeded",
    "PatternSyntaxError",
    "PrimaryEntity",
    "RuleSyntaxError",
    "ScoreReport",
    "StaleCache",
    "TransformError",
    "TransformRule",
    "UnknownClass",
    "annotate",
    "apply_transform",
    "build_lexicon",
    "diff_report",
    "disambiguate",
    "edit_distance",
    "enumerate_pattern",
    "generate_secondary",
    "index_concepts",
    "load_cache",
    "load_primary_entities",
    "load_transform_rules",
    "match_boundaries",
    "max_distance_for",
    "parse_rules",
    "precedence_key",
    "promote_candidates",
    "resolve_overlaps",
    "resource_fingerprint",
    "save_cache",
    "score_indexing",
    "score_ner",
    "serialize_rule",
]
