"""Title and keyword normalization.

Raw headings are turned into ordered canonical token sequences:
lowercase, punctuation replaced by spaces, stop words dropped, plurals
reduced by suffix rules and synonyms projected onto one canonical token.
Token order is kept because the matcher rewards contiguous runs.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

# Characters replaced by a space before splitting.  Symbols that carry
# meaning inside technical names ("C++", "C#") are deliberately absent.
STRIP_CHARS = "-\u2010\u2011\u2012\u2013\u2014/\\()[]{},:;.'\u2019\u2018\"\u201c\u201d&?!"
_STRIP_RE = re.compile("[" + re.escape(STRIP_CHARS) + "]")
_POSSESSIVE_RE = re.compile(r"['’]s\b")

DEFAULT_STOP_WORDS = frozenset(
    "a an the and or of to in on for with by from at as is are".split()
)

# Irregular plurals and words that merely end in "s".
SINGULAR_EXCEPTIONS: Mapping[str, str] = {
    "analysis": "analysis",
    "analyses": "analysis",
    "basis": "basis",
    "bases": "base",
    "axis": "axis",
    "thesis": "thesis",
    "synopsis": "synopsis",
    "hypothesis": "hypothesis",
    "status": "status",
    "bus": "bus",
    "corpus": "corpus",
    "campus": "campus",
    "virus": "virus",
    "bonus": "bonus",
    "focus": "focus",
    "consensus": "consensus",
    "census": "census",
    "apparatus": "apparatus",
    "series": "series",
    "species": "species",
    "news": "news",
    "physics": "physics",
    "mathematics": "mathematics",
    "economics": "economics",
    "statistics": "statistics",
    "semantics": "semantics",
    "analytics": "analytics",
    "ethics": "ethics",
    "lens": "lens",
    "gas": "gas",
    "atlas": "atlas",
    "alias": "alias",
    "canvas": "canvas",
    "bias": "bias",
    "chaos": "chaos",
    "its": "its",
    "has": "has",
    "was": "was",
    "this": "this",
    "thus": "thus",
    "always": "always",
    "perhaps": "perhaps",
    "whereas": "whereas",
    "across": "across",
    "unless": "unless",
    "aries": "aries",
    "dbms": "dbms",
    "rdbms": "rdbms",
    "oodbms": "oodbms",
    "thomas": "thomas",
    "indices": "index",
    "matrices": "matrix",
    "vertices": "vertex",
    "criteria": "criterion",
    "phenomena": "phenomenon",
    "schemata": "schema",
    "caches": "cache",
    "niches": "niche",
    "avalanches": "avalanche",
    "movies": "movie",
    "cookies": "cookie",
    "children": "child",
    "people": "person",
    "men": "man",
    "women": "woman",
}


class SynonymConflictError(ValueError):
    """A token was declared equivalent to two different canonical tokens."""


@dataclass(frozen=True)
class NormalizedKeywordSet:
    tokens: tuple[str, ...] = ()

    @property
    def set_view(self) -> frozenset[str]:
        return frozenset(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __bool__(self) -> bool:
        return bool(self.tokens)

    def render(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class StopWordList:
    words: frozenset[str] = DEFAULT_STOP_WORDS

    def __contains__(self, token: str) -> bool:
        return token in self.words

    @classmethod
    def default(cls) -> "StopWordList":
        return cls(DEFAULT_STOP_WORDS)

    @classmethod
    def load(cls, path: str | Path) -> "StopWordList":
        """Read one stop word per line; ``#`` starts a comment."""
        words = set()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.split("#", 1)[0].strip().lower()
            if line:
                words.add(line)
        if not words:
            raise ValueError(f"{path}: stop-word file contains no words")
        return cls(frozenset(words))


@dataclass(frozen=True)
class SynonymTable:
    """Token-level equivalence classes, each with one canonical member.

    ``entries`` maps a canonical token to all of its synonyms (transitively
    closed).  Lookups of a canonical return the canonical itself.
    """

    entries: Mapping[str, frozenset[str]] = field(default_factory=dict)
    _lookup: Mapping[str, str] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for canonical, synonyms in self.entries.items():
            index[canonical] = canonical
            for syn in synonyms:
                if index.get(syn, canonical) != canonical:
                    raise SynonymConflictError(
                        f"{syn!r} maps to both {index[syn]!r} and {canonical!r}"
                    )
                index[syn] = canonical
        object.__setattr__(self, "_lookup", index)

    def lookup(self, token: str) -> str:
        return self._lookup.get(token, token)

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "SynonymTable":
        """Build a table from ``(canonical, synonym)`` pairs.

        Both sides are lowercased and singularized so that the table speaks
        the same vocabulary as :func:`normalize_title`.  Chains such as
        ``a,b`` + ``b,c`` collapse onto ``a``.  A token declared as synonym
        of two different canonicals, or a cycle, raises
        :class:`SynonymConflictError` citing the offending rows.
        """
        parent: dict[str, str] = {}
        source: dict[str, tuple[int, str, str]] = {}
        tokens: list[str] = []
        for row_no, (canonical, synonym) in enumerate(pairs, start=1):
            can_parts, syn_parts = tokenize(canonical), tokenize(synonym)
            if len(can_parts) != 1 or len(syn_parts) != 1:
                raise ValueError(
                    f"row {row_no}: synonyms must be single tokens, got {canonical!r},{synonym!r}"
                )
            can, syn = singularize(can_parts[0]), singularize(syn_parts[0])
            for tok in (can, syn):
                if tok not in tokens:
                    tokens.append(tok)
            if can == syn:
                continue
            if syn in parent and parent[syn] != can:
                first = source[syn]
                raise SynonymConflictError(
                    f"{syn!r} has two canonicals: row {first[0]} "
                    f"({first[1]},{first[2]}) and row {row_no} ({canonical},{synonym})"
                )
            parent[syn] = can
            source[syn] = (row_no, canonical, synonym)

        def root(tok: str) -> str:
            seen = [tok]
            while tok in parent:
                tok = parent[tok]
                if tok in seen:
                    rows = sorted(source[t][0] for t in seen if t in source)
                    raise SynonymConflictError(f"synonym cycle through rows {rows}: {' -> '.join(seen + [tok])}")
                seen.append(tok)
            return tok

        groups: dict[str, set[str]] = {}
        for tok in tokens:
            can = root(tok)
            groups.setdefault(can, set())
            if tok != can:
                groups[can].add(tok)
        return cls({can: frozenset(syns) for can, syns in groups.items() if syns})


def load_synonyms(path: str | Path) -> SynonymTable:
    """Load a two-column ``canonical,synonym`` file.

    Blank lines, ``#`` comments and a literal ``canonical,synonym`` header
    are skipped.  An empty file gives the identity table.
    """
    pairs = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 2:
                raise ValueError(f"{path}: expected 2 columns, got {len(row)}: {row}")
            if [c.strip().lower() for c in row] == ["canonical", "synonym"]:
                continue
            pairs.append((row[0], row[1]))
    return SynonymTable.from_pairs(pairs)


def default_stop_words() -> StopWordList:
    return StopWordList.load(resources.files("toc_cluster.data") / "stopwords.txt")


def default_synonyms() -> SynonymTable:
    return load_synonyms(resources.files("toc_cluster.data") / "synonyms.csv")


def remove_stop_words(tokens: Iterable[str], stops: StopWordList) -> list[str]:
    return [t for t in tokens if t not in stops]


def singularize(token: str) -> str:
    if token in SINGULAR_EXCEPTIONS:
        return SINGULAR_EXCEPTIONS[token]
    if len(token) <= 2 or not token.endswith("s"):
        return token
    if token.endswith("ies") and len(token) > 4:
        return token[:-3] + "y"
    if token.endswith(("sses", "shes", "ches", "xes")):
        return token[:-2]
    if token.endswith(("ss", "us", "is")):
        return token
    return token[:-1]


def tokenize(raw: str) -> list[str]:
    return _STRIP_RE.sub(" ", _POSSESSIVE_RE.sub("", raw.lower())).split()


def normalize_title(
    raw: str,
    stops: StopWordList | None = None,
    syn: SynonymTable | None = None,
) -> NormalizedKeywordSet:
    stops = stops if stops is not None else StopWordList.default()
    tokens = remove_stop_words(tokenize(raw), stops)
    tokens = [singularize(t) for t in tokens]
    if syn is not None:
        tokens = [syn.lookup(t) for t in tokens]
    # singular forms or canonicals may themselves be stop words ("ins" -> "in")
    return NormalizedKeywordSet(tuple(remove_stop_words(tokens, stops)))


def normalize_keywords(
    phrases: Iterable[str],
    stops: StopWordList | None = None,
    syn: SynonymTable | None = None,
) -> NormalizedKeywordSet:
    """Concatenate the normalized tokens of several phrases, in order."""
    out: list[str] = []
    for phrase in phrases:
        out.extend(normalize_title(phrase, stops, syn).tokens)
    return NormalizedKeywordSet(tuple(out))
