import random

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import brute_confusion

from toc_cluster.clusterer import ClusterAssignment
from toc_cluster.data import corpus_path
from toc_cluster.eval_report import (
    EvalReport,
    EvalRow,
    EvaluationError,
    MonotonicityError,
    check_outlier_monotone,
    emit_report,
    evaluate,
    load_truth,
    sweep,
)
from toc_cluster.relevance import ScoringConfig


@pytest.fixture(scope="module")
def truth():
    return load_truth(corpus_path("truth.csv"))


@pytest.fixture(scope="module")
def report(corpus, truth, stops, syn):
    return sweep(corpus.target_tuples, corpus.reference, truth, ScoringConfig(), stops, syn)


def test_perfect_run():
    truth = {i: (i % 4) + 1 for i in range(1, 11)}
    row = evaluate([ClusterAssignment(i, c, 1.0) for i, c in truth.items()], truth, 4)
    assert (row.true_positive, row.false_positive, row.outlier) == (10, 0, 0)
    assert row.precision == 1.0


def test_all_outliers():
    truth = {i: 1 for i in range(1, 6)}
    row = evaluate([ClusterAssignment(i, None, 0.0) for i in truth], truth, 3)
    assert (row.true_positive, row.false_positive, row.outlier) == (0, 0, 5)
    assert row.precision == 0.0 and row.fp_rate_total == 0.0


def test_planted_confusion():
    truth = {1: 1, 2: 1, 3: 2, 4: 2, 5: 3, 6: 3, 7: None, 8: None, 9: 4, 10: 4}
    predicted = {1: 1, 2: 2, 3: 2, 4: None, 5: 3, 6: 1, 7: 3, 8: None, 9: 4, 10: 4}
    row = evaluate([ClusterAssignment(t, c, 1.0) for t, c in predicted.items()], truth, 4)
    # truth "outlier" assigned to a chapter is a false positive; verdict outlier is always an outlier
    assert (row.true_positive, row.false_positive, row.outlier) == brute_confusion(predicted, truth) == (5, 3, 2)
    assert row.fp_rate_total == pytest.approx(0.3)
    assert row.fp_rate_assigned == pytest.approx(3 / 8)


@given(st.dictionaries(st.integers(1, 200), st.tuples(st.sampled_from([None, 1, 2, 3]), st.sampled_from([None, 1, 2, 3]))))
def test_confusion_matches_oracle(pairs):
    truth = {t: tr for t, (tr, _) in pairs.items()}
    predicted = {t: p for t, (_, p) in pairs.items()}
    row = evaluate([ClusterAssignment(t, c, 1.0) for t, c in predicted.items()], truth, 3)
    assert (row.true_positive, row.false_positive, row.outlier) == brute_confusion(predicted, truth)
    assert row.total == len(pairs)


def test_missing_truth_names_ids():
    with pytest.raises(EvaluationError, match=r"\[2, 3\]"):
        evaluate([ClusterAssignment(1, 1, 1.0), ClusterAssignment(3, 1, 1.0), ClusterAssignment(2, 1, 1.0)], {1: 1}, 1)


def test_load_truth(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("tuple_id,expected\n5,3\n6,outlier\n")
    assert load_truth(p) == {5: 3, 6: None}
    p.write_text("5,3\n5,4\n")
    with pytest.raises(EvaluationError, match="duplicate"):
        load_truth(p)
    p.write_text("5\n")
    with pytest.raises(EvaluationError, match="malformed"):
        load_truth(p)


def test_shipped_truth_covers_targets(truth, corpus):
    assert sorted(truth) == [t.tuple_id for t in corpus.target_tuples]


def test_sweep_rows(report, corpus):
    assert [r.k for r in report.rows] == list(range(1, 25))
    assert all(r.total == len(corpus.target_tuples) for r in report.rows)
    outliers = [r.outlier for r in report.rows]
    assert outliers == sorted(outliers, reverse=True)


def test_fp_at_one_chapter_not_below_full(report):
    assert report.rows[0].false_positive >= report.full.false_positive


def test_monotonicity_guard():
    check_outlier_monotone([EvalRow(1, 0, 0, 5), EvalRow(2, 1, 0, 4)])
    with pytest.raises(MonotonicityError, match="k=2"):
        check_outlier_monotone([EvalRow(1, 0, 0, 4), EvalRow(2, 0, 0, 5)])


def test_sweep_independent_of_target_order(corpus, truth, report, stops, syn):
    shuffled = list(corpus.target_tuples)
    random.Random(3).shuffle(shuffled)
    assert sweep(shuffled, corpus.reference, truth, ScoringConfig(), stops, syn) == report


def test_series_and_table_agree(report):
    series = emit_report(report, "series")
    table = emit_report(report, "table")
    lines = series.splitlines()
    assert lines[0] == "k,tp,fp,outlier"
    assert len(lines) == 25
    table_rows = [line.split() for line in table.splitlines()[2:26]]
    assert [",".join(r) for r in table_rows] == lines[1:]
    assert f"precision at k=24: {report.precision_at_full:.4f}" in table


def test_emit_is_stable(report):
    for fmt in ("series", "table"):
        assert emit_report(report, fmt) == emit_report(EvalReport(tuple(report.rows)), fmt)


def test_emit_rejects_bad_input(report):
    with pytest.raises(ValueError):
        emit_report(report, "xml")
    with pytest.raises(EvaluationError):
        emit_report(EvalReport(()), "table")
