"""Ground-truth evaluation and chapter-prefix sweeps.

Every target tuple lands in exactly one column: true positive (assigned to
the expected chapter), false positive (assigned anywhere else, including
when the truth says ``outlier``) or outlier (no chapter had any relevance).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .clusterer import OUTLIER, ClusterAssignment, assign
from .content_model import BookTree, ContentTuple
from .relevance import ScoringConfig, score_all
from .text_normalize import StopWordList, SynonymTable

GroundTruth = Mapping[int, "int | None"]


class EvaluationError(ValueError):
    pass


class MonotonicityError(AssertionError):
    """The outlier count grew with a larger chapter prefix."""


def load_truth(path: str | Path) -> dict[int, int | None]:
    """Read ``tuple_id,expected`` rows; expected is a chapter ordinal or ``outlier``."""
    truth: dict[int, int | None] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            if line_no == 1 and row[0].strip().lower() == "tuple_id":
                continue
            try:
                tid = int(row[0])
                expected = row[1].strip().lower()
                value = None if expected == OUTLIER else int(expected)
            except (ValueError, IndexError):
                raise EvaluationError(f"{path}:{line_no}: malformed truth row {row}") from None
            if tid in truth:
                raise EvaluationError(f"{path}:{line_no}: duplicate tuple_id {tid}")
            truth[tid] = value
    return truth


@dataclass(frozen=True)
class EvalRow:
    k: int
    true_positive: int
    false_positive: int
    outlier: int

    @property
    def total(self) -> int:
        return self.true_positive + self.false_positive + self.outlier

    @property
    def precision(self) -> float:
        assigned = self.true_positive + self.false_positive
        return self.true_positive / assigned if assigned else 0.0

    @property
    def fp_rate_total(self) -> float:
        return self.false_positive / self.total if self.total else 0.0

    @property
    def fp_rate_assigned(self) -> float:
        assigned = self.true_positive + self.false_positive
        return self.false_positive / assigned if assigned else 0.0


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[EvalRow, ...]

    @property
    def full(self) -> EvalRow:
        return max(self.rows, key=lambda r: r.k)

    @property
    def precision_at_full(self) -> float:
        return self.full.precision


def evaluate(assignments: Sequence[ClusterAssignment], truth: GroundTruth, k: int) -> EvalRow:
    missing = sorted(a.tuple_id for a in assignments if a.tuple_id not in truth)
    if missing:
        raise EvaluationError(f"no ground truth for tuple ids {missing}")
    tp = fp = out = 0
    for a in assignments:
        if a.chapter is None:
            out += 1
        elif truth[a.tuple_id] == a.chapter:
            tp += 1
        else:
            fp += 1
    return EvalRow(k, tp, fp, out)


def check_outlier_monotone(rows: Sequence[EvalRow]) -> None:
    ordered = sorted(rows, key=lambda r: r.k)
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.outlier > prev.outlier:
            raise MonotonicityError(
                f"outlier count rose from {prev.outlier} at k={prev.k} to {cur.outlier} at k={cur.k}"
            )


def sweep(
    targets: Sequence[ContentTuple],
    reference: BookTree,
    truth: GroundTruth,
    cfg: ScoringConfig | None = None,
    stops: StopWordList | None = None,
    syn: SynonymTable | None = None,
) -> EvalReport:
    """Evaluate k = 1..n reference chapters.

    The full matrix is scored once; each k uses its first k columns, which
    is exactly what scoring against the k-chapter prefix yields.
    """
    cfg = cfg or ScoringConfig()
    full = score_all(targets, reference, None, cfg, stops, syn)
    rows = tuple(
        evaluate(assign(full.prefix(k), cfg.min_relevance), truth, k) for k in range(1, full.k + 1)
    )
    check_outlier_monotone(rows)
    return EvalReport(rows)


def emit_report(report: EvalReport, fmt: str = "table") -> str:
    if not report.rows:
        raise EvaluationError("empty report")
    if fmt == "series":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "tp", "fp", "outlier"])
        for r in report.rows:
            writer.writerow([r.k, r.true_positive, r.false_positive, r.outlier])
        return buf.getvalue()
    if fmt != "table":
        raise ValueError(f"unknown report format {fmt!r}")
    header = ("k", "true_positive", "false_positive", "outlier")
    body = [(str(r.k), str(r.true_positive), str(r.false_positive), str(r.outlier)) for r in report.rows]
    widths = [max(len(h), *(len(row[i]) for row in body)) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in body)
    full = report.full
    lines.append("")
    lines.append(f"precision at k={full.k}: {full.precision:.4f}")
    lines.append(f"false positives / all tuples: {full.fp_rate_total:.4f}")
    lines.append(f"false positives / assigned tuples: {full.fp_rate_assigned:.4f}")
    return "\n".join(lines) + "\n"
