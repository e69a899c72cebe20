"""Book trees, the relational tuple store, and the generalized tree.

A book is a four level hierarchy (chapter, section, subsection, topic
keywords).  Every root-to-subsection path flattens into one
:class:`ContentTuple`; the tuple store is the CSV rendering of those rows.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .text_normalize import normalize_title

STORE_HEADER = (
    "tuple_id",
    "book_title",
    "chapter_title",
    "section_title",
    "subsection_title",
    "topic_keywords",
)
KEYWORD_SEP = ";"


class StructureError(ValueError):
    """A tree or tuple list violates the book structure invariants."""


def _check_ordinals(kind: str, nodes: Sequence, where: str) -> None:
    for expected, node in enumerate(nodes, start=1):
        if node.ordinal != expected:
            raise StructureError(
                f"{where}: {kind} ordinals must run 1..{len(nodes)}, "
                f"found {node.ordinal} at position {expected}"
            )


@dataclass(frozen=True)
class SubsectionNode:
    ordinal: int
    title: str
    topic_keywords: tuple[str, ...] = ()
    # Stands in for a section that had no subsections of its own.
    synthetic: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "topic_keywords", tuple(self.topic_keywords))
        if not self.title.strip():
            raise StructureError(f"subsection {self.ordinal}: empty title")


@dataclass(frozen=True)
class SectionNode:
    ordinal: int
    title: str
    subsections: tuple[SubsectionNode, ...] = ()
    synthetic: bool = field(default=False, compare=False)

    def __post_init__(self):
        subs = tuple(self.subsections)
        if not subs:
            subs = (SubsectionNode(1, self.title, synthetic=True),)
        object.__setattr__(self, "subsections", subs)
        _check_ordinals("subsection", subs, f"section {self.title!r}")


@dataclass(frozen=True)
class ChapterNode:
    ordinal: int
    title: str
    sections: tuple[SectionNode, ...] = ()

    def __post_init__(self):
        sections = tuple(self.sections)
        if not sections:
            sections = (SectionNode(1, self.title, synthetic=True),)
        object.__setattr__(self, "sections", sections)
        _check_ordinals("section", sections, f"chapter {self.title!r}")

    def subsection_count(self) -> int:
        return sum(len(s.subsections) for s in self.sections)


@dataclass(frozen=True)
class BookTree:
    book_id: str
    title: str
    chapters: tuple[ChapterNode, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "chapters", tuple(self.chapters))
        _check_ordinals("chapter", self.chapters, f"book {self.title!r}")

    def validate(self) -> "BookTree":
        """Check chapter disjointness: no two chapters may share a normalized title."""
        seen: dict[frozenset[str] | str, ChapterNode] = {}
        for ch in self.chapters:
            key: frozenset[str] | str = normalize_title(ch.title).set_view
            if not key:
                key = " ".join(ch.title.lower().split())
            if key in seen:
                raise StructureError(
                    f"{self.title} > chapter {ch.ordinal} {ch.title!r}: duplicates "
                    f"chapter {seen[key].ordinal} {seen[key].title!r}"
                )
            seen[key] = ch
        return self

    @property
    def section_count(self) -> int:
        return sum(len(ch.sections) for ch in self.chapters)

    @property
    def subsection_count(self) -> int:
        return sum(ch.subsection_count() for ch in self.chapters)


@dataclass(frozen=True)
class ContentTuple:
    tuple_id: int
    book_title: str
    chapter_title: str
    section_title: str
    subsection_title: str
    topic_keywords: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "topic_keywords", tuple(self.topic_keywords))
        if self.tuple_id < 1:
            raise StructureError(f"tuple_id must be positive, got {self.tuple_id}")

    @property
    def path(self) -> str:
        return " > ".join(
            (self.book_title, self.chapter_title, self.section_title, self.subsection_title)
        )


def flatten(tree: BookTree, start_id: int = 1) -> list[ContentTuple]:
    """One tuple per subsection in document order, ids counting up from ``start_id``."""
    tree.validate()
    rows = []
    next_id = start_id
    for ch in tree.chapters:
        for sec in ch.sections:
            for sub in sec.subsections:
                rows.append(
                    ContentTuple(
                        next_id, tree.title, ch.title, sec.title, sub.title, sub.topic_keywords
                    )
                )
                next_id += 1
    return rows


def unflatten(tuples: Sequence[ContentTuple], book_id: str | None = None) -> BookTree:
    """Rebuild the tree that :func:`flatten` produced.

    Consecutive rows with equal chapter (and section) titles belong to the
    same node.  A title that reappears after a different one, a non
    consecutive tuple id, or a second book title is an error.
    A section whose only subsection repeats its title without keywords is
    taken to be a synthesized leaf.
    """
    if not tuples:
        raise StructureError("cannot unflatten an empty tuple list")
    titles = {t.book_title for t in tuples}
    if len(titles) > 1:
        raise StructureError(f"tuples from several books: {sorted(titles)}")
    for prev, cur in zip(tuples, tuples[1:]):
        if cur.tuple_id != prev.tuple_id + 1:
            raise StructureError(
                f"tuple ids not consecutive: {prev.tuple_id} followed by {cur.tuple_id}"
            )

    # chapter title -> section title -> list of rows, insertion ordered
    grouped: dict[str, dict[str, list[ContentTuple]]] = {}
    last_chapter = last_section = None
    for t in tuples:
        if t.chapter_title != last_chapter:
            if t.chapter_title in grouped:
                raise StructureError(
                    f"tuple {t.tuple_id}: chapter {t.chapter_title!r} reappears out of order"
                )
            grouped[t.chapter_title] = {}
            last_chapter, last_section = t.chapter_title, None
        sections = grouped[t.chapter_title]
        if t.section_title != last_section:
            if t.section_title in sections:
                raise StructureError(
                    f"tuple {t.tuple_id}: section {t.section_title!r} reappears out of order"
                )
            sections[t.section_title] = []
            last_section = t.section_title
        sections[t.section_title].append(t)

    chapters = []
    for c_ord, (c_title, sections) in enumerate(grouped.items(), start=1):
        sec_nodes = []
        for s_ord, (s_title, rows) in enumerate(sections.items(), start=1):
            if len(rows) == 1 and rows[0].subsection_title == s_title and not rows[0].topic_keywords:
                subs: tuple[SubsectionNode, ...] = ()
            else:
                subs = tuple(
                    SubsectionNode(i, r.subsection_title, r.topic_keywords)
                    for i, r in enumerate(rows, start=1)
                )
            sec_nodes.append(SectionNode(s_ord, s_title, subs))
        if len(sec_nodes) == 1 and sec_nodes[0].title == c_title and sec_nodes[0].subsections[0].synthetic:
            sec_nodes = []
        chapters.append(ChapterNode(c_ord, c_title, tuple(sec_nodes)))
    title = tuples[0].book_title
    return BookTree(book_id or title, title, tuple(chapters))


# ---------------------------------------------------------------------------
# Tuple store (CSV)
# ---------------------------------------------------------------------------

def write_store(tuples: Iterable[ContentTuple], path: str | Path | None = None) -> str:
    """Serialize tuples; returns the text and writes it when ``path`` is given."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(STORE_HEADER)
    for t in tuples:
        writer.writerow(
            [
                t.tuple_id,
                t.book_title,
                t.chapter_title,
                t.section_title,
                t.subsection_title,
                KEYWORD_SEP.join(t.topic_keywords),
            ]
        )
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_store(path: str | Path) -> list[ContentTuple]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != STORE_HEADER:
            raise StructureError(f"{path}: bad tuple-store header {header}")
        rows = []
        seen = set()
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(STORE_HEADER):
                raise StructureError(f"{path}:{line_no}: expected {len(STORE_HEADER)} fields")
            tid = int(row[0])
            if tid in seen:
                raise StructureError(f"{path}:{line_no}: duplicate tuple_id {tid}")
            seen.add(tid)
            keywords = tuple(k for k in row[5].split(KEYWORD_SEP) if k.strip())
            rows.append(ContentTuple(tid, row[1], row[2], row[3], row[4], keywords))
    return rows


# ---------------------------------------------------------------------------
# Generalized tree
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Member:
    book_id: str
    tuple: ContentTuple
    manual: bool = False


@dataclass(frozen=True)
class Cluster:
    cluster_id: str
    label: str
    chapter: int | None
    members: tuple[Member, ...] = ()


UNASSIGNED_ID = "Unassigned"


@dataclass(frozen=True)
class GeneralizedTree:
    group_id: str
    clusters: tuple[Cluster, ...]
    unassigned: Cluster
    reference_book_id: str | None = None
    audit: tuple[dict, ...] = ()

    def cluster_for(self, chapter: int) -> Cluster:
        if not 1 <= chapter <= len(self.clusters):
            raise KeyError(f"no cluster for chapter {chapter}")
        return self.clusters[chapter - 1]

    def all_members(self) -> list[Member]:
        out = [m for c in self.clusters for m in c.members]
        out.extend(self.unassigned.members)
        return out

    def tuple_ids(self) -> set[int]:
        return {m.tuple.tuple_id for m in self.all_members()}

    def with_audit(self, entry: dict) -> "GeneralizedTree":
        return replace(self, audit=self.audit + (entry,))

    def to_dict(self) -> dict:
        """Nested rendering: group, clusters, sections, subsections, keywords."""
        return {
            "group_id": self.group_id,
            "reference_book_id": self.reference_book_id,
            "clusters": [_cluster_dict(c) for c in self.clusters],
            "unassigned": _cluster_dict(self.unassigned),
            "audit": list(self.audit),
        }


def _cluster_dict(cluster: Cluster) -> dict:
    sections: list[dict] = []
    for m in cluster.members:
        t = m.tuple
        key = (m.book_id, t.chapter_title, t.section_title)
        if not sections or sections[-1]["_key"] != key:
            sections.append(
                {
                    "_key": key,
                    "book_id": m.book_id,
                    "chapter_title": t.chapter_title,
                    "title": t.section_title,
                    "subsections": [],
                }
            )
        sub = {"tuple_id": t.tuple_id, "title": t.subsection_title, "keywords": list(t.topic_keywords)}
        if m.manual:
            sub["manual"] = True
        sections[-1]["subsections"].append(sub)
    for s in sections:
        del s["_key"]
    return {
        "id": cluster.cluster_id,
        "label": cluster.label,
        "chapter": cluster.chapter,
        "sections": sections,
    }


def gt_init(group_id: str, reference: BookTree, start_id: int = 1) -> GeneralizedTree:
    """One cluster ``C_i`` per reference chapter, seeded with the reference's own tuples."""
    reference.validate()
    rows = flatten(reference, start_id)
    by_chapter: dict[str, list[Member]] = {}
    for t in rows:
        by_chapter.setdefault(t.chapter_title, []).append(Member(reference.book_id, t))
    clusters = tuple(
        Cluster(f"C{ch.ordinal}", ch.title, ch.ordinal, tuple(by_chapter.get(ch.title, ())))
        for ch in reference.chapters
    )
    return GeneralizedTree(
        group_id=group_id,
        clusters=clusters,
        unassigned=Cluster(UNASSIGNED_ID, UNASSIGNED_ID, None),
        reference_book_id=reference.book_id,
    )
