"""Turn a score matrix into chapter assignments and merge them into the GT."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .content_model import Cluster, ContentTuple, GeneralizedTree, Member
from .relevance import ScoreMatrix

# Totals this close are a tie; keeps verdicts stable under weight rescaling.
TIE_REL_TOL = 1e-9

OUTLIER = "outlier"


class OverrideError(ValueError):
    pass


class MergeError(ValueError):
    pass


@dataclass(frozen=True)
class ClusterAssignment:
    """Verdict for one target tuple; ``chapter is None`` means Outlier."""

    tuple_id: int
    chapter: int | None
    winning_score: float
    runner_up_margin: float = 0.0
    manual: bool = False
    reason: str = ""

    @property
    def is_outlier(self) -> bool:
        return self.chapter is None

    @property
    def verdict(self) -> str:
        return OUTLIER if self.chapter is None else str(self.chapter)


def assign_row(tuple_id: int, totals: Sequence[float], min_relevance: float = 0.0) -> ClusterAssignment:
    best_idx = None
    for i, score in enumerate(totals):
        if best_idx is None or (
            score > totals[best_idx] and not math.isclose(score, totals[best_idx], rel_tol=TIE_REL_TOL)
        ):
            best_idx = i
    if best_idx is None:
        return ClusterAssignment(tuple_id, None, 0.0)
    best = totals[best_idx]
    others = [s for i, s in enumerate(totals) if i != best_idx]
    margin = best - max(others) if others else 0.0
    if best <= 0 or best < min_relevance:
        return ClusterAssignment(tuple_id, None, best, margin)
    return ClusterAssignment(tuple_id, best_idx + 1, best, margin)


def assign(scores: ScoreMatrix, min_relevance: float = 0.0) -> list[ClusterAssignment]:
    """Argmax chapter per tuple; ties go to the lowest ordinal, all-zero rows are outliers."""
    return [assign_row(tid, scores.totals(tid), min_relevance) for tid in scores.tuple_ids]


# ---------------------------------------------------------------------------
# Manual overrides
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Override:
    tuple_id: int
    chapter: int | None
    reason: str = ""


def load_overrides(path: str | Path) -> list[Override]:
    """Read ``tuple_id,target,reason`` rows; target is a chapter ordinal or ``outlier``."""
    rows = []
    bad = []
    with open(path, newline="", encoding="utf-8") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            if line_no == 1 and row[0].strip().lower() == "tuple_id":
                continue
            try:
                tid = int(row[0])
                target = row[1].strip().lower()
                chapter = None if target == OUTLIER else int(target)
            except (ValueError, IndexError):
                bad.append(f"line {line_no}: {','.join(row)}")
                continue
            rows.append(Override(tid, chapter, ",".join(row[2:]).strip()))
    if bad:
        raise OverrideError(f"{path}: malformed override rows: " + "; ".join(bad))
    return rows


def apply_overrides(
    assignments: Sequence[ClusterAssignment],
    overrides: Iterable[Override],
    chapter_count: int,
) -> list[ClusterAssignment]:
    overrides = list(overrides)
    known = {a.tuple_id for a in assignments}
    problems = []
    seen: set[int] = set()
    for o in overrides:
        if o.tuple_id not in known:
            problems.append(f"unknown tuple_id {o.tuple_id}")
        if o.chapter is not None and not 1 <= o.chapter <= chapter_count:
            problems.append(f"tuple {o.tuple_id}: chapter {o.chapter} outside 1..{chapter_count}")
        if o.tuple_id in seen:
            problems.append(f"tuple {o.tuple_id} overridden twice")
        seen.add(o.tuple_id)
    if problems:
        raise OverrideError("invalid overrides: " + "; ".join(problems))
    by_id = {o.tuple_id: o for o in overrides}
    out = []
    for a in assignments:
        o = by_id.get(a.tuple_id)
        out.append(a if o is None else replace(a, chapter=o.chapter, manual=True, reason=o.reason))
    return out


# ---------------------------------------------------------------------------
# GT formation
# ---------------------------------------------------------------------------

def gt_merge(
    gt: GeneralizedTree,
    assignments: Sequence[ClusterAssignment],
    targets: Sequence[ContentTuple],
    book_id: str | None = None,
) -> GeneralizedTree:
    """Append one target book's tuples to their clusters (outliers to Unassigned).

    Returns a new tree; the input is untouched.  Callers merging several
    books must feed each result into the next call.
    """
    by_id = {a.tuple_id: a for a in assignments}
    missing = [t.tuple_id for t in targets if t.tuple_id not in by_id]
    if missing:
        raise MergeError(f"no assignment for tuple ids {missing}")
    extra = sorted(set(by_id) - {t.tuple_id for t in targets})
    if extra:
        raise MergeError(f"assignments for unknown tuple ids {extra}")
    present = gt.tuple_ids()
    dupes = [t.tuple_id for t in targets if t.tuple_id in present]
    if dupes:
        raise MergeError(f"tuple ids already merged: {dupes}")
    if not targets:
        return gt.with_audit({"event": "merge", "book_id": book_id, "members": 0, "note": "no-op"})

    book = book_id or targets[0].book_title
    added: dict[int | None, list[Member]] = {}
    for t in targets:
        a = by_id[t.tuple_id]
        if a.chapter is not None and not 1 <= a.chapter <= len(gt.clusters):
            raise MergeError(f"tuple {t.tuple_id}: no cluster for chapter {a.chapter}")
        added.setdefault(a.chapter, []).append(Member(book, t, a.manual))

    clusters = tuple(
        replace(c, members=c.members + tuple(added.get(c.chapter, ()))) for c in gt.clusters
    )
    unassigned: Cluster = replace(gt.unassigned, members=gt.unassigned.members + tuple(added.get(None, ())))
    manual = [a.tuple_id for a in assignments if a.manual]
    entry = {
        "event": "merge",
        "book_id": book,
        "members": len(targets),
        "assigned": len(targets) - len(added.get(None, ())),
        "unassigned": len(added.get(None, ())),
        "manual": manual,
    }
    return replace(gt, clusters=clusters, unassigned=unassigned, audit=gt.audit + (entry,))


def write_assignments(
    assignments: Sequence[ClusterAssignment],
    path: str | Path,
    book_of: dict[int, str] | None = None,
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["tuple_id", "book_id", "verdict", "score", "margin", "manual", "reason"])
        for a in assignments:
            writer.writerow(
                [
                    a.tuple_id,
                    (book_of or {}).get(a.tuple_id, ""),
                    a.verdict,
                    f"{a.winning_score:.6f}",
                    f"{a.runner_up_margin:.6f}",
                    "manual" if a.manual else "",
                    a.reason,
                ]
            )
