import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from toc_cluster.content_model import BookTree, ChapterNode, SectionNode, SubsectionNode  # noqa: E402
from toc_cluster.data import corpus_path  # noqa: E402
from toc_cluster.pipeline import Corpus  # noqa: E402
from toc_cluster.text_normalize import default_stop_words, default_synonyms  # noqa: E402

# Tokens normalization leaves alone: lowercase, no stop words, no trailing "s".
TOY_TOKENS = ["alpha", "beta", "gamma", "delta", "kappa", "omega", "zeta"]


@pytest.fixture(scope="session")
def stops():
    return default_stop_words()


@pytest.fixture(scope="session")
def syn():
    return default_synonyms()


@pytest.fixture(scope="session")
def corpus():
    return Corpus.load(
        corpus_path("reference.toc"), [corpus_path("target_a.toc"), corpus_path("target_b.toc")]
    )


@pytest.fixture
def small_book():
    """Three chapters, five subsections."""
    return BookTree(
        "fixture",
        "Fixture Book",
        (
            ChapterNode(1, "Introduction", (
                SectionNode(1, "Overview", (
                    SubsectionNode(1, "Database System Application", ("banking", "airlines")),
                    SubsectionNode(2, "Purpose of Database Systems"),
                )),
            )),
            ChapterNode(2, "Relational Model", (
                SectionNode(1, "Structure of Relational Databases", (
                    SubsectionNode(1, "Keys"),
                )),
                SectionNode(2, "Null Values"),
            )),
            ChapterNode(3, "Transactions", (
                SectionNode(1, "Serializability", (SubsectionNode(1, "Conflict Serializability"),)),
            )),
        ),
    )


# ---------------------------------------------------------------------------
# Hypothesis strategies
# ---------------------------------------------------------------------------

title_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc", "Zl", "Zp")), min_size=1, max_size=20
).map(str.strip).filter(bool)

keyword_text = title_text.filter(lambda s: ";" not in s)


@st.composite
def book_trees(draw, max_chapters=5, max_sections=4, max_subsections=4):
    n_ch = draw(st.integers(0, max_chapters))
    chapters = []
    for c in range(1, n_ch + 1):
        n_sec = draw(st.integers(1, max_sections))
        sections = []
        for s in range(1, n_sec + 1):
            n_sub = draw(st.integers(0, max_subsections))
            subs = tuple(
                SubsectionNode(i, draw(title_text), tuple(draw(st.lists(keyword_text, max_size=3))))
                for i in range(1, n_sub + 1)
            )
            # section titles unique within the chapter
            sections.append(SectionNode(s, f"{draw(title_text)} s{s}", subs))
        # chapter titles distinct after normalization
        chapters.append(ChapterNode(c, f"{draw(title_text)} chapter{c}x", tuple(sections)))
    return BookTree("random", draw(title_text), tuple(chapters))


toy_titles = st.lists(st.sampled_from(TOY_TOKENS), min_size=1, max_size=6).map(" ".join)


@st.composite
def toy_chapters(draw):
    """Plain-dict chapter for the oracle, <=4 sections, <=3 subsections, titles <=6 tokens."""
    sections = []
    for _ in range(draw(st.integers(0, 4))):
        subs = [
            {"title": draw(toy_titles), "keywords": draw(st.lists(toy_titles, max_size=2))}
            for _ in range(draw(st.integers(1, 3)))
        ]
        sections.append({"title": draw(toy_titles), "subsections": subs})
    return {"title": draw(toy_titles), "sections": sections}


def toy_to_node(ordinal, chapter):
    return ChapterNode(
        ordinal,
        chapter["title"],
        tuple(
            SectionNode(
                si,
                sec["title"],
                tuple(
                    SubsectionNode(ssi, sub["title"], tuple(sub.get("keywords", ())))
                    for ssi, sub in enumerate(sec["subsections"], 1)
                ),
            )
            for si, sec in enumerate(chapter["sections"], 1)
        ),
    )


# ---------------------------------------------------------------------------
# Acceptance summary
# ---------------------------------------------------------------------------

_acceptance = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and (
        report.when == "call" or (report.when == "setup" and report.outcome != "passed")
    ):
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
