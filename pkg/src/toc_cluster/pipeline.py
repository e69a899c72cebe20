"""End-to-end helpers shared by the CLI and the acceptance tests."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .clusterer import ClusterAssignment, Override, apply_overrides, assign, gt_merge
from .content_model import BookTree, ContentTuple, GeneralizedTree, flatten, gt_init
from .relevance import ScoringConfig, score_all
from .text_normalize import StopWordList, SynonymTable
from .toc_ingest import load_book


@dataclass(frozen=True)
class Corpus:
    """A reference book and its target books with one global tuple-id sequence.

    Ids start at 1 with the reference, then continue through the targets
    in the order given, so identical inputs always get identical ids.
    """

    reference: BookTree
    reference_tuples: tuple[ContentTuple, ...]
    targets: tuple[tuple[BookTree, tuple[ContentTuple, ...]], ...]

    @classmethod
    def from_books(cls, reference: BookTree, targets: Sequence[BookTree]) -> "Corpus":
        ref_rows = tuple(flatten(reference, 1))
        next_id = len(ref_rows) + 1
        out = []
        for book in targets:
            rows = tuple(flatten(book, next_id))
            next_id += len(rows)
            out.append((book, rows))
        return cls(reference, ref_rows, tuple(out))

    @classmethod
    def load(cls, reference: str | Path, targets: Sequence[str | Path]) -> "Corpus":
        return cls.from_books(load_book(reference), [load_book(p) for p in targets])

    @property
    def target_tuples(self) -> list[ContentTuple]:
        return [t for _, rows in self.targets for t in rows]

    def all_tuples(self) -> list[ContentTuple]:
        return list(self.reference_tuples) + self.target_tuples

    def book_of(self) -> dict[int, str]:
        out = {t.tuple_id: self.reference.book_id for t in self.reference_tuples}
        for book, rows in self.targets:
            out.update((t.tuple_id, book.book_id) for t in rows)
        return out


def cluster_corpus(
    corpus: Corpus,
    cfg: ScoringConfig,
    stops: StopWordList,
    syn: SynonymTable,
    k: int | None = None,
    overrides: Sequence[Override] = (),
    group_id: str = "CMC",
) -> tuple[list[ClusterAssignment], GeneralizedTree]:
    """Score, assign and merge every target book into one generalized tree."""
    targets = corpus.target_tuples
    matrix = score_all(targets, corpus.reference, k, cfg, stops, syn)
    assignments = assign(matrix, cfg.min_relevance)
    if overrides:
        assignments = apply_overrides(assignments, overrides, matrix.k)
    by_id = {a.tuple_id: a for a in assignments}
    gt = gt_init(group_id, corpus.reference)
    for book, rows in corpus.targets:
        gt = gt_merge(gt, [by_id[t.tuple_id] for t in rows], rows, book.book_id)
    return assignments, gt
