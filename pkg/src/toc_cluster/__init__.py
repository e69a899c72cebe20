"""Cluster textbook tables of contents onto the chapters of a reference book."""

from .clusterer import ClusterAssignment, apply_overrides, assign, gt_merge
from .content_model import (
    BookTree,
    ChapterNode,
    ContentTuple,
    GeneralizedTree,
    SectionNode,
    SubsectionNode,
    flatten,
    gt_init,
    unflatten,
)
from .eval_report import EvalReport, EvalRow, emit_report, evaluate, sweep
from .relevance import (
    MatchResult,
    RelevanceScore,
    ScoringConfig,
    level_contribution,
    matching_count,
    score_all,
    score_subsection,
)
from .text_normalize import (
    NormalizedKeywordSet,
    StopWordList,
    SynonymTable,
    load_synonyms,
    normalize_title,
    remove_stop_words,
    singularize,
)

__version__ = "0.1.0"
