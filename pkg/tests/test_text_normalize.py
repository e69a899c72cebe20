import pytest
from hypothesis import given
from hypothesis import strategies as st

from toc_cluster.data import data_path
from toc_cluster.text_normalize import (
    DEFAULT_STOP_WORDS,
    StopWordList,
    SynonymConflictError,
    SynonymTable,
    default_stop_words,
    load_synonyms,
    normalize_title,
    remove_stop_words,
    singularize,
)


# -- remove_stop_words ------------------------------------------------------

def test_leading_article_removed(stops):
    assert remove_stop_words(["the", "entity", "relation", "model"], stops) == ["entity", "relation", "model"]


def test_all_stop_words_removed(stops):
    assert remove_stop_words(["and", "or", "the"], stops) == []


def test_remove_stop_words_empty(stops):
    assert remove_stop_words([], stops) == []


@given(st.lists(st.sampled_from(["a", "the", "of", "join", "query", "index", "and", "view"])))
def test_stop_word_removal_keeps_order(tokens):
    stops = StopWordList.default()
    out = remove_stop_words(tokens, stops)
    assert out == [t for t in tokens if t not in DEFAULT_STOP_WORDS]
    assert not any(t in stops for t in out)


def test_shipped_stop_word_file_matches_default():
    assert default_stop_words() == StopWordList.default()
    assert {"a", "an", "the", "and", "or"} <= default_stop_words().words


def test_stop_word_file_comments(tmp_path):
    p = tmp_path / "stop.txt"
    p.write_text("# comment\nfoo\n  Bar  # trailing\n\n")
    assert StopWordList.load(p).words == {"foo", "bar"}


def test_empty_stop_word_file_rejected(tmp_path):
    p = tmp_path / "stop.txt"
    p.write_text("# nothing\n")
    with pytest.raises(ValueError):
        StopWordList.load(p)


# -- singularize -------------------------------------------------------------

@pytest.mark.parametrize(
    "plural, singular",
    [
        ("applications", "application"),
        ("queries", "query"),
        ("databases", "database"),
        ("classes", "class"),
        ("hashes", "hash"),
        ("branches", "branch"),
        ("indexes", "index"),
        ("access", "access"),
        ("analysis", "analysis"),
        ("basis", "basis"),
        ("indices", "index"),
        ("aries", "aries"),
        ("dbms", "dbms"),
        ("is", "is"),
    ],
)
def test_singularize(plural, singular):
    assert singularize(plural) == singular


# Every token of the shipped corpus that the rules change, audited by hand.
AUDITED_CORPUS_PLURALS = {
    "acknowledgments": "acknowledgment", "administrators": "administrator",
    "advantages": "advantage", "airlines": "airline", "algorithms": "algorithm",
    "alternatives": "alternative", "applications": "application",
    "architectures": "architecture", "arrays": "array", "attributes": "attribute",
    "basics": "basic", "bottlenecks": "bottleneck", "cardinalities": "cardinality",
    "checkpoints": "checkpoint", "concepts": "concept", "constraints": "constraint",
    "constructs": "construct", "cubes": "cube", "databases": "database",
    "decompositions": "decomposition", "dependencies": "dependency", "designs": "design",
    "diagrams": "diagram", "disks": "disk", "documents": "document", "domains": "domain",
    "engines": "engine", "entities": "entity", "executions": "execution",
    "expressions": "expression", "features": "feature", "files": "file",
    "formats": "format", "forms": "form", "functions": "function",
    "fundamentals": "fundamental", "generators": "generator", "heuristics": "heuristic",
    "hyperlinks": "hyperlink", "indices": "index", "instances": "instance",
    "interfaces": "interface", "joins": "join", "keys": "key", "languages": "language",
    "levels": "level", "locks": "lock", "measures": "measure", "models": "model",
    "monitors": "monitor", "networks": "network", "notes": "note", "objects": "object",
    "operations": "operation", "operators": "operator", "overflows": "overflow",
    "people": "person", "phases": "phase", "plans": "plan", "privileges": "privilege",
    "procedures": "procedure", "properties": "property", "protocols": "protocol",
    "queries": "query", "questions": "question", "records": "record",
    "relations": "relation", "relationships": "relationship", "results": "result",
    "roles": "role", "rules": "rule", "schedules": "schedule", "schemas": "schema",
    "schemes": "scheme", "selections": "selection", "servers": "server",
    "servlets": "servlet", "sets": "set", "statements": "statement",
    "subqueries": "subquery", "systems": "system", "tables": "table",
    "techniques": "technique", "terms": "term", "timestamps": "timestamp",
    "tools": "tool", "transactions": "transaction", "trees": "tree",
    "triggers": "trigger", "tuples": "tuple", "types": "type",
    "universities": "university", "updates": "update", "users": "user",
    "values": "value", "views": "view", "workflows": "workflow",
}


def test_corpus_vocabulary_singulars():
    assert {w: singularize(w) for w in AUDITED_CORPUS_PLURALS} == AUDITED_CORPUS_PLURALS


@given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=2, max_size=12))
def test_singularize_never_empty(token):
    assert singularize(token)


@given(st.text(alphabet="abcehiorsuxy", min_size=1, max_size=10))
def test_singularize_idempotent(token):
    once = singularize(token)
    assert singularize(once) == once


# -- normalize_title ---------------------------------------------------------

def test_entity_relationship_title(stops, syn):
    assert normalize_title("The Entity-Relationship Model", stops, syn).tokens == ("entity", "relationship", "model")


def test_overview_maps_to_introduction(stops):
    table = SynonymTable.from_pairs([("introduction", "overview")])
    assert normalize_title("Overview", stops, table).tokens == ("introduction",)


def test_empty_title(stops, syn):
    result = normalize_title("", stops, syn)
    assert result.tokens == ()
    assert not result


def test_strip_class_and_plural(stops, syn):
    got = normalize_title("B+-Trees: Indexing (Static/Dynamic) & Hashing's Basics.", stops, syn)
    assert got.tokens == ("b+", "tree", "indexing", "static", "dynamic", "hashing", "basic")


def test_singular_that_becomes_stop_word_is_dropped(stops):
    # "ins" singularizes to the stop word "in"
    assert normalize_title("plug ins", stops).tokens == ("plug",)


def test_set_view_deduplicates():
    got = normalize_title("Data and Data Models")
    assert got.tokens == ("data", "data", "model")
    assert got.set_view == {"data", "model"}


@given(st.text(max_size=60))
def test_normalize_idempotent(raw):
    stops = StopWordList.default()
    table = SynonymTable.from_pairs([("introduction", "overview"), ("organization", "organisation")])
    once = normalize_title(raw, stops, table)
    assert normalize_title(once.render(), stops, table).tokens == once.tokens
    for tok in once.tokens:
        assert tok and tok == tok.lower()
        assert not any(c in tok for c in "-/(),:.'&")
        assert tok not in stops


# -- synonyms -----------------------------------------------------------------

def test_load_synonym_row(tmp_path):
    p = tmp_path / "syn.csv"
    p.write_text("introduction,overview\n")
    table = load_synonyms(p)
    assert table.lookup("overview") == "introduction"
    assert table.lookup("introduction") == "introduction"


def test_empty_synonym_file_is_identity(tmp_path):
    p = tmp_path / "syn.csv"
    p.write_text("")
    table = load_synonyms(p)
    assert len(table) == 0
    assert table.lookup("anything") == "anything"


def test_conflicting_canonicals(tmp_path):
    p = tmp_path / "syn.csv"
    p.write_text("a,b\nc,b\n")
    with pytest.raises(SynonymConflictError) as exc:
        load_synonyms(p)
    assert "row 1" in str(exc.value) and "row 2" in str(exc.value)


def test_synonym_chain_is_transitively_closed():
    table = SynonymTable.from_pairs([("introduction", "overview"), ("overview", "preface")])
    assert table.lookup("preface") == "introduction"
    assert table.entries == {"introduction": frozenset({"overview", "preface"})}


def test_synonym_cycle_rejected():
    with pytest.raises(SynonymConflictError):
        SynonymTable.from_pairs([("a", "b"), ("b", "a")])


def test_synonym_entries_are_singularized():
    table = SynonymTable.from_pairs([("introductions", "overviews")])
    assert table.lookup("overview") == "introduction"


def test_phrase_synonyms_rejected():
    with pytest.raises(ValueError):
        SynonymTable.from_pairs([("entity relationship", "er")])


def test_shipped_synonyms(syn):
    assert syn.lookup("overview") == "introduction"
    assert syn.lookup("serialisability") == "serializability"
    assert data_path("synonyms.csv").is_file()


@given(st.lists(st.sampled_from(["overview", "introduction", "organisation", "join", "preface"]), max_size=8))
def test_synonym_projection(tokens):
    table = SynonymTable.from_pairs([("introduction", "overview"), ("overview", "preface"), ("organization", "organisation")])
    once = [table.lookup(t) for t in tokens]
    assert [table.lookup(t) for t in once] == once
