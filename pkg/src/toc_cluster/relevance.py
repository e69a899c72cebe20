"""Relevance of a target subsection to a reference chapter.

The target subsection's normalized title is compared with every node of
the reference chapter: the chapter title, each section title, each
subsection title and each topic keyword phrase.  A node whose token set
equals the target's earns the level weight times the proximity
multiplier.  Otherwise partial credit comes from the matched unigrams and
the matched contiguous n-grams ("combination" matching).  Level weights
decay from chapter down to topic.
"""

from __future__ import annotations

import configparser
import enum
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .content_model import BookTree, ChapterNode, ContentTuple
from .text_normalize import (
    NormalizedKeywordSet,
    StopWordList,
    SynonymTable,
    normalize_keywords,
    normalize_title,
)


class Level(enum.Enum):
    CHAPTER = "chapter"
    SECTION = "section"
    SUBSECTION = "subsection"
    TOPIC = "topic"


@dataclass(frozen=True)
class ScoringConfig:
    chapter: float = 16.0
    section: float = 8.0
    subsection: float = 4.0
    topic: float = 2.0
    proximity: float = 2.0
    combination_enabled: bool = True
    include_target_topics: bool = False
    # verdicts below this winning score become outliers; 0 keeps only true zeros
    min_relevance: float = 0.0

    def __post_init__(self):
        if not (self.chapter > self.section > self.subsection > self.topic >= 0):
            raise ValueError(
                "level weights must strictly decrease chapter > section > subsection > topic >= 0, "
                f"got {self.chapter}, {self.section}, {self.subsection}, {self.topic}"
            )
        if self.proximity < 1:
            raise ValueError(f"proximity multiplier must be >= 1, got {self.proximity}")
        if self.min_relevance < 0:
            raise ValueError("min_relevance must be >= 0")

    @property
    def level_weights(self) -> dict[Level, float]:
        return {
            Level.CHAPTER: self.chapter,
            Level.SECTION: self.section,
            Level.SUBSECTION: self.subsection,
            Level.TOPIC: self.topic,
        }

    def weight(self, level: Level) -> float:
        return self.level_weights[level]

    def scaled(self, factor: float) -> "ScoringConfig":
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return replace(
            self,
            chapter=self.chapter * factor,
            section=self.section * factor,
            subsection=self.subsection * factor,
            topic=self.topic * factor,
            min_relevance=self.min_relevance * factor,
        )


_CONFIG_KEYS = {
    "weight.chapter": ("chapter", float),
    "weight.section": ("section", float),
    "weight.subsection": ("subsection", float),
    "weight.topic": ("topic", float),
    "proximity.multiplier": ("proximity", float),
    "combination.enabled": ("combination_enabled", bool),
    "target.include_topics": ("include_target_topics", bool),
    "cluster.min_relevance": ("min_relevance", float),
}


def load_scoring_config(path: str | Path) -> ScoringConfig:
    """Read ``key = value`` lines (``weight.chapter = 16`` ...) into a config."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.read_string("[scoring]\n" + Path(path).read_text(encoding="utf-8"), source=str(path))
    section = parser["scoring"]
    unknown = sorted(set(section) - set(_CONFIG_KEYS))
    if unknown:
        raise ValueError(f"{path}: unknown scoring keys {unknown}")
    kwargs = {}
    for key, (attr, kind) in _CONFIG_KEYS.items():
        if key in section:
            kwargs[attr] = section.getboolean(key) if kind is bool else section.getfloat(key)
    return ScoringConfig(**kwargs)


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MatchResult:
    matched_unigrams: frozenset[str] = frozenset()
    matched_ngrams: frozenset[tuple[str, ...]] = frozenset()
    full_match: bool = False

    @property
    def keysets(self) -> frozenset[tuple[str, ...]]:
        """All matched keyword sets, unigrams as 1-tuples: {A, B, AB} -> {(a,), (b,), (a, b)}."""
        return frozenset((u,) for u in self.matched_unigrams) | self.matched_ngrams

    def __bool__(self) -> bool:
        return bool(self.matched_unigrams)


EMPTY_MATCH = MatchResult()


def _ngrams(tokens: Sequence[str], n: int) -> set[tuple[str, ...]]:
    return {tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)}


def matching_count(target: NormalizedKeywordSet, reference: NormalizedKeywordSet) -> MatchResult:
    """Iteratively grow matched keyword combinations.

    Pass 1 keeps target tokens that occur in the reference.  Pass k keeps
    target k-grams that occur contiguously in the reference, but only
    examines windows whose two (k-1)-gram halves survived pass k-1.  Any
    window containing an unmatched token is therefore never built.
    """
    t, r = target.tokens, reference.tokens
    unigrams = frozenset(target.set_view & reference.set_view)
    if not unigrams:
        return EMPTY_MATCH
    ngrams: set[tuple[str, ...]] = set()
    prev = {(u,) for u in unigrams}
    n = 2
    while prev and n <= len(t):
        ref_grams = _ngrams(r, n)
        cur = set()
        for i in range(len(t) - n + 1):
            window = tuple(t[i : i + n])
            if window[:-1] in prev and window[1:] in prev and window in ref_grams:
                cur.add(window)
        ngrams |= cur
        prev = cur
        n += 1
    full = target.set_view == reference.set_view
    return MatchResult(unigrams, frozenset(ngrams), full)


def ngram_capacity(target_size: int) -> int:
    """Number of contiguous windows of length >= 2 in a sequence of this length."""
    return target_size * (target_size - 1) // 2


def level_contribution(match: MatchResult, level: Level, cfg: ScoringConfig, target_size: int) -> float:
    if target_size < 1:
        raise ValueError("target_size must be >= 1")
    if not match:
        return 0.0
    w = cfg.weight(level)
    if match.full_match:
        return w * cfg.proximity
    if not cfg.combination_enabled:
        return 0.0
    score = w * len(match.matched_unigrams) / target_size
    if match.matched_ngrams:
        score += w * len(match.matched_ngrams) / ngram_capacity(target_size)
    return score


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReferenceNode:
    level: Level
    path: str
    keywords: NormalizedKeywordSet


@dataclass(frozen=True)
class Contribution:
    level: Level
    path: str
    match: MatchResult
    value: float


@dataclass(frozen=True)
class RelevanceScore:
    target_tuple_id: int
    reference_chapter_ordinal: int
    total: float
    breakdown: tuple[Contribution, ...] = ()
    degenerate: bool = False


def reference_nodes(
    chapter: ChapterNode, stops: StopWordList | None = None, syn: SynonymTable | None = None
) -> list[ReferenceNode]:
    """Normalized title of every node under ``chapter``, top level first.

    Synthesized sections/subsections only repeat their parent's title and
    are skipped so the parent is not counted twice.  Each topic keyword
    phrase is its own node: adjacency across two phrases is not proximity.
    """
    c = chapter.ordinal
    nodes = [ReferenceNode(Level.CHAPTER, f"{c}", normalize_title(chapter.title, stops, syn))]
    for sec in chapter.sections:
        if not sec.synthetic:
            nodes.append(
                ReferenceNode(Level.SECTION, f"{c}.{sec.ordinal}", normalize_title(sec.title, stops, syn))
            )
        for sub in sec.subsections:
            spath = f"{c}.{sec.ordinal}.{sub.ordinal}"
            if not sub.synthetic:
                nodes.append(ReferenceNode(Level.SUBSECTION, spath, normalize_title(sub.title, stops, syn)))
            for i, kw in enumerate(sub.topic_keywords, start=1):
                nodes.append(ReferenceNode(Level.TOPIC, f"{spath}#{i}", normalize_title(kw, stops, syn)))
    return nodes


def target_keywords(
    target: ContentTuple,
    cfg: ScoringConfig,
    stops: StopWordList | None = None,
    syn: SynonymTable | None = None,
) -> NormalizedKeywordSet:
    phrases = [target.subsection_title]
    if cfg.include_target_topics:
        phrases.extend(target.topic_keywords)
    return normalize_keywords(phrases, stops, syn)


def score_nodes(
    tuple_id: int,
    chapter_ordinal: int,
    keywords: NormalizedKeywordSet,
    nodes: Iterable[ReferenceNode],
    cfg: ScoringConfig,
) -> RelevanceScore:
    if not keywords:
        return RelevanceScore(tuple_id, chapter_ordinal, 0.0, degenerate=True)
    breakdown = []
    for node in nodes:
        match = matching_count(keywords, node.keywords)
        value = level_contribution(match, node.level, cfg, len(keywords))
        if value:
            breakdown.append(Contribution(node.level, node.path, match, value))
    return RelevanceScore(tuple_id, chapter_ordinal, sum(b.value for b in breakdown), tuple(breakdown))


def score_subsection(
    target: ContentTuple,
    ref_chapter: ChapterNode,
    cfg: ScoringConfig | None = None,
    stops: StopWordList | None = None,
    syn: SynonymTable | None = None,
) -> RelevanceScore:
    cfg = cfg or ScoringConfig()
    return score_nodes(
        target.tuple_id,
        ref_chapter.ordinal,
        target_keywords(target, cfg, stops, syn),
        reference_nodes(ref_chapter, stops, syn),
        cfg,
    )


@dataclass(frozen=True)
class ScoreMatrix:
    """Scores of each target tuple against the first ``k`` reference chapters."""

    k: int
    tuple_ids: tuple[int, ...]
    rows: dict[int, tuple[RelevanceScore, ...]] = field(repr=False)

    def row(self, tuple_id: int) -> tuple[RelevanceScore, ...]:
        return self.rows[tuple_id]

    def totals(self, tuple_id: int) -> list[float]:
        return [s.total for s in self.rows[tuple_id]]

    def prefix(self, k: int) -> "ScoreMatrix":
        """The matrix restricted to chapters 1..k (scores do not depend on k)."""
        if not 1 <= k <= self.k:
            raise ValueError(f"prefix k={k} outside 1..{self.k}")
        return ScoreMatrix(k, self.tuple_ids, {tid: r[:k] for tid, r in self.rows.items()})


def score_all(
    targets: Sequence[ContentTuple],
    reference: BookTree,
    k: int | None = None,
    cfg: ScoringConfig | None = None,
    stops: StopWordList | None = None,
    syn: SynonymTable | None = None,
) -> ScoreMatrix:
    cfg = cfg or ScoringConfig()
    n = len(reference.chapters)
    k = n if k is None else k
    if not 1 <= k <= n:
        raise ValueError(f"chapter prefix k={k} outside 1..{n}")
    profiles = [(ch.ordinal, reference_nodes(ch, stops, syn)) for ch in reference.chapters[:k]]
    rows = {}
    for t in targets:
        if t.tuple_id in rows:
            raise ValueError(f"duplicate target tuple_id {t.tuple_id}")
        kw = target_keywords(t, cfg, stops, syn)
        rows[t.tuple_id] = tuple(score_nodes(t.tuple_id, c, kw, nodes, cfg) for c, nodes in profiles)
    return ScoreMatrix(k, tuple(t.tuple_id for t in targets), rows)
