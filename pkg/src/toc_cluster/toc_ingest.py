"""Parse table-of-contents files into :class:`BookTree` values.

Two formats are understood.

Indented text, one heading per line::

    title: Database System Concepts
    Introduction
    <TAB>Overview
    <TAB><TAB>Database System Application
    <TAB><TAB><TAB>keywords: banking; airlines

Depth 0 is a chapter, 1 a section, 2 a subsection and 3 a ``keywords:``
line.  A file indents either with tabs or with spaces, never both; for
spaces the unit is the gcd of all indent widths in the file.

Structured JSON mirroring the tree: ``{"title", "chapters": [{"title",
"sections": [{"title", "subsections": [{"title", "keywords": []}]}]}]}``.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

from .content_model import BookTree, ChapterNode, SectionNode, SubsectionNode

HEADER_RE = re.compile(r"^title:\s*(.*)$", re.IGNORECASE)
KEYWORDS_RE = re.compile(r"^keywords:\s*(.*)$", re.IGNORECASE)


class TocFormat(enum.Enum):
    INDENTED = "indented"
    STRUCTURED = "structured"


class TocParseError(ValueError):
    def __init__(self, source: str, message: str, line: int | None = None):
        self.source = source
        self.line = line
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class TocDocument:
    source_path: str
    format: TocFormat
    text: str

    @property
    def book_id(self) -> str:
        return Path(self.source_path).stem or self.source_path


def detect_format(path: str | Path, text: str) -> TocFormat:
    if str(path).lower().endswith(".json") or text.lstrip().startswith("{"):
        return TocFormat.STRUCTURED
    return TocFormat.INDENTED


def read_toc(path: str | Path, fmt: TocFormat | None = None) -> TocDocument:
    text = Path(path).read_text(encoding="utf-8")
    return TocDocument(str(path), fmt or detect_format(path, text), text)


def load_book(path: str | Path, fmt: TocFormat | None = None) -> BookTree:
    doc = read_toc(path, fmt)
    if doc.format is TocFormat.STRUCTURED:
        return parse_structured(doc)
    return parse_indented(doc)


def split_keywords(raw: str) -> list[str]:
    # ';' is canonical; a bare comma list ("banking, airlines,") is accepted too
    sep = ";" if ";" in raw else ","
    return [k.strip() for k in raw.split(sep) if k.strip()]


# ---------------------------------------------------------------------------
# Indented text
# ---------------------------------------------------------------------------

def _indent_of(line: str) -> str:
    return line[: len(line) - len(line.lstrip(" \t"))]


def _indent_unit(text: str) -> str:
    """A tab if the file indents with tabs, else the gcd of all space indents."""
    widths = []
    for line in text.splitlines():
        indent = _indent_of(line)
        if indent and line.strip():
            if indent[0] == "\t":
                return "\t"
            widths.append(len(indent) - len(indent.lstrip(" ")))
    return " " * (math.gcd(*widths) if widths else 1)


def parse_indented(doc: TocDocument) -> BookTree:
    src = doc.source_path
    title = None
    unit = _indent_unit(doc.text)
    # nested plain lists, converted to nodes once the whole file is read
    chapters: list[tuple[str, list]] = []
    prev_depth = -1

    for line_no, raw in enumerate(doc.text.splitlines(), start=1):
        if not raw.strip():
            continue
        indent = _indent_of(raw)
        text = raw.strip()
        if not indent and title is None and not chapters:
            m = HEADER_RE.match(text)
            if m:
                title = m.group(1).strip()
                continue

        if not indent:
            depth = 0
        else:
            if " " in indent and "\t" in indent:
                raise TocParseError(src, "mixed tabs and spaces in indentation", line_no)
            if indent.replace(unit, ""):
                raise TocParseError(
                    src, f"indentation {indent!r} is not a multiple of the unit {unit!r}", line_no
                )
            depth = len(indent) // len(unit)

        if depth > 3:
            raise TocParseError(src, f"depth {depth} exceeds the maximum of 3", line_no)
        if depth > prev_depth + 1:
            raise TocParseError(
                src, f"level jump from depth {max(prev_depth, 0)} to {depth}", line_no
            )

        kw = KEYWORDS_RE.match(text)
        if depth == 3:
            if not kw:
                raise TocParseError(src, "depth-3 lines must start with 'keywords:'", line_no)
            chapters[-1][1][-1][1][-1][1].extend(split_keywords(kw.group(1)))
            # further keyword lines stay at depth 3
            prev_depth = 2
            continue
        if kw:
            raise TocParseError(src, "'keywords:' line must sit under a subsection", line_no)

        if depth == 0:
            chapters.append((text, []))
        elif depth == 1:
            chapters[-1][1].append((text, []))
        else:
            chapters[-1][1][-1][1].append((text, []))
        prev_depth = depth

    if not chapters:
        raise TocParseError(src, "no chapters")
    tree = BookTree(
        doc.book_id,
        title or doc.book_id,
        tuple(
            ChapterNode(
                ci,
                ct,
                tuple(
                    SectionNode(
                        si,
                        st,
                        tuple(SubsectionNode(ssi, sst, tuple(kws)) for ssi, (sst, kws) in enumerate(subs, 1)),
                    )
                    for si, (st, subs) in enumerate(secs, 1)
                ),
            )
            for ci, (ct, secs) in enumerate(chapters, 1)
        ),
    )
    return tree.validate()


def emit_indented(tree: BookTree, indent: str = "\t") -> str:
    lines = [f"title: {tree.title}"]
    for ch in tree.chapters:
        lines.append(ch.title)
        for sec in ch.sections:
            if sec.synthetic:
                continue
            lines.append(indent + sec.title)
            for sub in sec.subsections:
                if sub.synthetic:
                    continue
                lines.append(indent * 2 + sub.title)
                if sub.topic_keywords:
                    lines.append(indent * 3 + "keywords: " + "; ".join(sub.topic_keywords))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Structured (JSON)
# ---------------------------------------------------------------------------

def _title(src: str, obj, path: str) -> str:
    if not isinstance(obj, dict):
        raise TocParseError(src, f"{path}: expected an object")
    value = obj.get("title")
    if not isinstance(value, str) or not value.strip():
        raise TocParseError(src, f"missing field {path + '.' if path else ''}title")
    return value.strip()


def _list(src: str, obj: dict, key: str, path: str) -> list:
    value = obj.get(key, [])
    if not isinstance(value, list):
        raise TocParseError(src, f"{path}.{key}: expected a list")
    return value


def parse_structured(doc: TocDocument) -> BookTree:
    src = doc.source_path
    try:
        data = json.loads(doc.text)
    except json.JSONDecodeError as exc:
        raise TocParseError(src, f"invalid JSON: {exc.msg}", exc.lineno) from None
    title = _title(src, data, "")
    raw_chapters = _list(src, data, "chapters", "book")
    if not raw_chapters:
        raise TocParseError(src, "no chapters")
    chapters = []
    for ci, ch in enumerate(raw_chapters):
        cpath = f"chapters[{ci}]"
        sections = []
        for si, sec in enumerate(_list(src, ch, "sections", cpath) if isinstance(ch, dict) else []):
            spath = f"{cpath}.sections[{si}]"
            subs = []
            for ssi, sub in enumerate(_list(src, sec, "subsections", spath) if isinstance(sec, dict) else []):
                sspath = f"{spath}.subsections[{ssi}]"
                kws = _list(src, sub, "keywords", sspath) if isinstance(sub, dict) else []
                if not all(isinstance(k, str) for k in kws):
                    raise TocParseError(src, f"{sspath}.keywords: expected strings")
                subs.append(
                    SubsectionNode(ssi + 1, _title(src, sub, sspath), tuple(k.strip() for k in kws if k.strip()))
                )
            sections.append(SectionNode(si + 1, _title(src, sec, spath), tuple(subs)))
        chapters.append(ChapterNode(ci + 1, _title(src, ch, cpath), tuple(sections)))
    book_id = data.get("book_id") or doc.book_id
    return BookTree(str(book_id), title, tuple(chapters)).validate()


def tree_to_dict(tree: BookTree) -> dict:
    return {
        "book_id": tree.book_id,
        "title": tree.title,
        "chapters": [
            {
                "title": ch.title,
                "sections": [
                    {
                        "title": sec.title,
                        "subsections": [
                            {"title": sub.title, "keywords": list(sub.topic_keywords)}
                            for sub in sec.subsections
                            if not sub.synthetic
                        ],
                    }
                    for sec in ch.sections
                    if not sec.synthetic
                ],
            }
            for ch in tree.chapters
        ],
    }


def emit_structured(tree: BookTree) -> str:
    return json.dumps(tree_to_dict(tree), indent=2, ensure_ascii=False) + "\n"
