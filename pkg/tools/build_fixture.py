"""Regenerate the shipped fixture corpus from the annotated sources.

    python tools/build_fixture.py

Writes src/toc_cluster/data/corpus/{reference,target_a,target_b}.toc and
truth.csv.  Tuple ids follow the CLI's order: the reference first, then
target_a, then target_b, one id per subsection.
"""

import re
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from toc_cluster.toc_ingest import TocDocument, TocFormat, parse_indented  # noqa: E402

OUT = ROOT / "src" / "toc_cluster" / "data" / "corpus"
LABEL_RE = re.compile(r"\s+@(\w+)\s*$")


def strip_labels(text):
    lines, labels = [], []
    for line in text.splitlines():
        if line.startswith("#"):
            continue
        m = LABEL_RE.search(line)
        if m:
            labels.append(m.group(1))
            line = line[: m.start()]
        lines.append(line)
    return "\n".join(lines) + "\n", labels


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    ref_text = (ROOT / "tools" / "reference_source.txt").read_text()
    (OUT / "reference.toc").write_text(ref_text)
    ref = parse_indented(TocDocument("reference.toc", TocFormat.INDENTED, ref_text))
    next_id = ref.subsection_count + 1
    truth = ["tuple_id,expected"]
    for name in ("target_a", "target_b"):
        text, labels = strip_labels((ROOT / "tools" / f"{name}_source.txt").read_text())
        book = parse_indented(TocDocument(f"{name}.toc", TocFormat.INDENTED, text))
        if len(labels) != book.subsection_count:
            raise SystemExit(f"{name}: {len(labels)} labels for {book.subsection_count} subsections")
        (OUT / f"{name}.toc").write_text(text)
        for label in labels:
            truth.append(f"{next_id},{label}")
            next_id += 1
    (OUT / "truth.csv").write_text("\n".join(truth) + "\n")
    print(f"reference: {len(ref.chapters)} chapters, {ref.section_count} sections, "
          f"{ref.subsection_count} subsections; {len(truth) - 1} truth rows")


if __name__ == "__main__":
    main()
