"""Command-line entry point: ``toc-cluster ingest|cluster|evaluate|sweep``.

Options may also come from a key-value run config named by ``--config`` or
the ``TOC_CLUSTER_CONFIG`` environment variable; flags win over it.
Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .clusterer import OverrideError, load_overrides, write_assignments
from .content_model import StructureError, write_store
from .eval_report import (
    EvalReport,
    EvaluationError,
    MonotonicityError,
    emit_report,
    evaluate,
    load_truth,
    sweep,
)
from .pipeline import Corpus, cluster_corpus
from .relevance import ScoringConfig, load_scoring_config
from .text_normalize import StopWordList, SynonymConflictError, default_stop_words, default_synonyms, load_synonyms
from .toc_ingest import TocParseError

log = logging.getLogger("toc_cluster")

CONFIG_ENV = "TOC_CLUSTER_CONFIG"
PATH_KEYS = ("reference", "stopwords", "synonyms", "scoring", "truth", "overrides", "out")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    reference: Path | None = None
    targets: list[Path] = field(default_factory=list)
    stopwords: Path | None = None
    synonyms: Path | None = None
    scoring: Path | None = None
    truth: Path | None = None
    overrides: Path | None = None
    out: Path = Path("out")
    chapters: int | None = None
    group_id: str = "CMC"
    format: str | None = None


def read_run_config(path: Path) -> dict:
    """Key-value file; relative paths resolve against the file's directory."""
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    parser.read_string("[run]\n" + path.read_text(encoding="utf-8"), source=str(path))
    raw = dict(parser["run"])
    base = path.parent
    out: dict = {}
    for key, value in raw.items():
        key = key.replace("-", "_")
        if key in PATH_KEYS:
            out[key] = base / value
        elif key in ("target", "targets"):
            out["targets"] = [base / v.strip() for v in value.replace(",", "\n").splitlines() if v.strip()]
        elif key == "chapters":
            out[key] = value
        elif key in ("group_id", "format"):
            out[key] = value
        else:
            raise UsageError(f"{path}: unknown key {key!r}")
    return out


def resolve(args: argparse.Namespace) -> RunConfig:
    cfg_path = args.config or os.environ.get(CONFIG_ENV)
    base = read_run_config(Path(cfg_path)) if cfg_path else {}
    rc = RunConfig()
    for key in PATH_KEYS + ("group_id", "format"):
        flag = getattr(args, key, None)
        value = flag if flag is not None else base.get(key)
        if value is not None:
            setattr(rc, key, Path(value) if key in PATH_KEYS else value)
    rc.targets = [Path(p) for p in args.target] if args.target else base.get("targets", [])
    chapters = args.chapters if args.chapters is not None else base.get("chapters")
    if chapters is not None:
        try:
            rc.chapters = int(chapters)
        except ValueError:
            raise UsageError(f"--chapters must be an integer, got {chapters!r}") from None
    return rc


def validate(rc: RunConfig, need_targets: bool = True, need_truth: bool = False) -> None:
    """Collect every configuration problem before any work starts."""
    problems = []
    if rc.reference is None:
        problems.append("--reference is required")
    if need_targets and not rc.targets:
        problems.append("at least one --target is required")
    if need_truth and rc.truth is None:
        problems.append("--truth is required: the sweep compares assignments with ground truth")
    for label, p in [("reference", rc.reference), ("stopwords", rc.stopwords), ("synonyms", rc.synonyms),
                     ("scoring", rc.scoring), ("truth", rc.truth), ("overrides", rc.overrides)]:
        if p is not None and not p.is_file():
            problems.append(f"{label} file not found: {p}")
    for p in rc.targets:
        if not p.is_file():
            problems.append(f"target file not found: {p}")
    if rc.chapters is not None and rc.chapters < 1:
        problems.append(f"--chapters must be >= 1, got {rc.chapters}")
    if rc.format not in (None, "table", "series"):
        problems.append(f"--format must be table or series, got {rc.format!r}")
    if rc.out.exists() and not rc.out.is_dir():
        problems.append(f"output path is not a directory: {rc.out}")
    if problems:
        raise UsageError("\n".join(problems))


def _resources(rc: RunConfig):
    stops = StopWordList.load(rc.stopwords) if rc.stopwords else default_stop_words()
    syn = load_synonyms(rc.synonyms) if rc.synonyms else default_synonyms()
    scoring = load_scoring_config(rc.scoring) if rc.scoring else ScoringConfig()
    return stops, syn, scoring


def _load_corpus(rc: RunConfig) -> Corpus:
    corpus = Corpus.load(rc.reference, rc.targets)
    n = len(corpus.reference.chapters)
    if rc.chapters is not None and rc.chapters > n:
        raise UsageError(f"--chapters {rc.chapters} exceeds the reference's {n} chapters")
    return corpus


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def book_table(rows: list[tuple[str, int, int, int]]) -> str:
    header = ("Book Name", "No. of Chapters", "No. of Sections", "No. of Subsections")
    cells = [header] + [(n, str(c), str(s), str(ss)) for n, c, s, ss in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(4)]
    lines = [
        "  ".join([r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])])
        for r in cells
    ]
    return "\n".join(lines) + "\n"


def cmd_ingest(args: argparse.Namespace) -> int:
    rc = resolve(args)
    paths = [Path(p) for p in args.tocs] or ([rc.reference] if rc.reference else []) + rc.targets
    if not paths:
        raise UsageError("no TOC files given")
    missing = [str(p) for p in paths if not p.is_file()]
    if missing:
        raise UsageError("TOC file not found: " + ", ".join(missing))
    corpus = Corpus.load(paths[0], paths[1:])
    rows = []
    for book in [corpus.reference] + [b for b, _ in corpus.targets]:
        real_sections = sum(1 for ch in book.chapters for s in ch.sections if not s.synthetic)
        rows.append((book.title, len(book.chapters), real_sections, book.subsection_count))
    store = rc.out / "tuples.csv"
    _write(store, write_store(corpus.all_tuples()))
    sys.stdout.write(book_table(rows))
    log.info("wrote %d tuples to %s", len(corpus.all_tuples()), store)
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    rc = resolve(args)
    validate(rc)
    stops, syn, scoring = _resources(rc)
    overrides = load_overrides(rc.overrides) if rc.overrides else []
    corpus = _load_corpus(rc)
    assignments, gt = cluster_corpus(corpus, scoring, stops, syn, rc.chapters, overrides, rc.group_id)
    _write(rc.out / "tuples.csv", write_store(corpus.all_tuples()))
    rc.out.mkdir(parents=True, exist_ok=True)
    write_assignments(assignments, rc.out / "assignments.csv", corpus.book_of())
    _write(rc.out / "gt.json", json.dumps(gt.to_dict(), indent=2, ensure_ascii=False) + "\n")
    outliers = sum(a.is_outlier for a in assignments)
    manual = sum(a.manual for a in assignments)
    print(
        f"clustered {len(assignments)} subsections onto {rc.chapters or len(corpus.reference.chapters)} "
        f"chapters: {len(assignments) - outliers} assigned, {outliers} outliers, {manual} manual"
    )
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    rc = resolve(args)
    validate(rc, need_truth=True)
    stops, syn, scoring = _resources(rc)
    overrides = load_overrides(rc.overrides) if rc.overrides else []
    truth = load_truth(rc.truth)
    corpus = _load_corpus(rc)
    k = rc.chapters or len(corpus.reference.chapters)
    assignments, _ = cluster_corpus(corpus, scoring, stops, syn, k, overrides, rc.group_id)
    row = evaluate(assignments, truth, k)
    sys.stdout.write(emit_report(EvalReport((row,)), "table"))
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    rc = resolve(args)
    validate(rc, need_truth=True)
    stops, syn, scoring = _resources(rc)
    truth = load_truth(rc.truth)
    corpus = _load_corpus(rc)
    report = sweep(corpus.target_tuples, corpus.reference, truth, scoring, stops, syn)
    if rc.chapters is not None:
        report = EvalReport(tuple(r for r in report.rows if r.k <= rc.chapters))
    formats = [rc.format] if rc.format else ["table", "series"]
    names = {"table": "sweep_table.txt", "series": "sweep_series.csv"}
    for fmt in formats:
        _write(rc.out / names[fmt], emit_report(report, fmt))
    full = report.full
    print(
        f"precision at k={full.k}: {full.precision:.4f} "
        f"(tp={full.true_positive} fp={full.false_positive} outlier={full.outlier}; "
        f"fp/all={full.fp_rate_total:.4f} fp/assigned={full.fp_rate_assigned:.4f})"
    )
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"run config file (default: ${CONFIG_ENV})")
    common.add_argument("--reference", help="reference book TOC")
    common.add_argument("--target", action="append", help="target book TOC (repeatable)")
    common.add_argument("--stopwords", help="stop-word file, one word per line")
    common.add_argument("--synonyms", help="canonical,synonym file")
    common.add_argument("--scoring", help="scoring key-value config")
    common.add_argument("--truth", help="ground truth tuple_id,expected")
    common.add_argument("--overrides", help="manual overrides tuple_id,target,reason")
    common.add_argument("--chapters", help="chapter prefix k (default: all)")
    common.add_argument("--group-id", dest="group_id", help="CMC group id at the GT root")
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("--format", help="report format: table or series (default: both)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="toc-cluster", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("ingest", parents=[common], help="parse TOCs and write the tuple store")
    p.add_argument("tocs", nargs="*", help="TOC files; the first is numbered first")
    p.set_defaults(func=cmd_ingest)
    for name, func, help_ in [
        ("cluster", cmd_cluster, "assign target subsections and write the generalized tree"),
        ("evaluate", cmd_evaluate, "score assignments at one k against ground truth"),
        ("sweep", cmd_sweep, "evaluate every chapter prefix k = 1..n"),
    ]:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"toc-cluster: error: {exc}", file=sys.stderr)
        return 2
    except (TocParseError, StructureError, SynonymConflictError, OverrideError, EvaluationError) as exc:
        print(f"toc-cluster: {exc}", file=sys.stderr)
        return 1
    except MonotonicityError as exc:
        print(f"toc-cluster: invariant violated: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"toc-cluster: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
