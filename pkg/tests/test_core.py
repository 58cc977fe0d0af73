import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osreval import fixtures
from osreval.core import (
    UNKNOWN,
    ClassCatalog,
    GeneralConfusionMatrix,
    InvalidCatalog,
    PredictionRecord,
    ScoreLengthMismatch,
    UnknownLabel,
    UucPrediction,
    build_general_matrix,
    per_uuc_class_breakdown,
    records_from_matrix,
    validate_records,
)


class TestCatalog:
    def test_rejects_overlap(self):
        with pytest.raises(InvalidCatalog):
            ClassCatalog(("a", "b"), ("b", "c"))

    def test_rejects_duplicates(self):
        with pytest.raises(InvalidCatalog):
            ClassCatalog(("a", "a"), ())

    def test_rejects_empty_known(self):
        with pytest.raises(InvalidCatalog):
            ClassCatalog((), ("x",))

    def test_sentinel_reserved(self):
        with pytest.raises(InvalidCatalog):
            ClassCatalog(("a", UNKNOWN))

    def test_index_maps_unknowns_to_k(self):
        cat = ClassCatalog(("a", "b"), ("x", "y"))
        assert [cat.index(c) for c in ("a", "b", "x", "y", UNKNOWN)] == [0, 1, 2, 2, 2]


class TestValidateRecords:
    def test_closed_pred_from_scores(self):
        cat = ClassCatalog(("class0", "cat"), ("dog",))
        rs = validate_records([PredictionRecord("cat", UNKNOWN, scores=[0.6, 0.4])], cat)
        assert rs.records[0].closed_pred == "class0"

    def test_argmax_tie_goes_to_lowest_index(self):
        cat = ClassCatalog(("a", "b", "c"))
        rs = validate_records([PredictionRecord("c", UNKNOWN, scores=[0.2, 0.4, 0.4])], cat)
        assert rs.records[0].closed_pred == "b"

    def test_explicit_closed_pred_kept(self):
        cat = ClassCatalog(("a", "b"))
        rs = validate_records([PredictionRecord("a", UNKNOWN, "b", scores=[0.9, 0.1])], cat)
        assert rs.records[0].closed_pred == "b"

    def test_uuc_prediction_rejected(self):
        cat = ClassCatalog(("a", "b"), ("x",))
        with pytest.raises(UucPrediction):
            validate_records([PredictionRecord("a", "x")], cat)

    def test_unknown_true_label(self):
        cat = ClassCatalog(("a", "b"), ("x",))
        with pytest.raises(UnknownLabel):
            validate_records([PredictionRecord("zzz", "a")], cat)

    def test_score_length(self):
        cat = ClassCatalog(("a", "b"))
        with pytest.raises(ScoreLengthMismatch):
            validate_records([PredictionRecord("a", "a", scores=[1.0])], cat)

    def test_missing_closed_pred_is_flagged_not_fatal(self):
        cat = ClassCatalog(("a", "b"), ("x",))
        rs = validate_records([PredictionRecord("a", UNKNOWN), PredictionRecord("x", UNKNOWN),
                               PredictionRecord("b", "b")], cat)
        assert rs.missing_closed_pred == 1

    def test_fixture_counts(self, fig_records, fig_catalog):
        rs = validate_records(fig_records, fig_catalog)
        assert (len(rs), rs.n_kkc_true, rs.n_uuc_true) == (76, 61, 15)


class TestGeneralMatrix:
    def test_fixture(self, fig_records, fig_catalog):
        g = build_general_matrix(fig_records, fig_catalog)
        np.testing.assert_array_equal(g.counts, fixtures.GENERAL)
        assert g.false_unknowns == 11
        assert g.false_knowns == 5
        assert g.total == 76

    def test_empty(self):
        g = build_general_matrix([], ClassCatalog(("a", "b", "c", "d")))
        np.testing.assert_array_equal(g.counts, np.zeros((5, 5)))

    def test_single_cell(self):
        g = build_general_matrix([PredictionRecord("a", "a")] * 3, ClassCatalog(("a", "b")))
        expected = np.zeros((3, 3), dtype=int)
        expected[0, 0] = 3
        np.testing.assert_array_equal(g.counts, expected)

    def test_row_sums(self, fig_records, fig_catalog):
        g = build_general_matrix(fig_records, fig_catalog)
        assert g.counts.sum(axis=1).tolist() == [16, 15, 15, 15, 15]

    def test_immutable(self, fig_records, fig_catalog):
        g = build_general_matrix(fig_records, fig_catalog)
        with pytest.raises(ValueError):
            g.counts[0, 0] = 99

    def test_permutation_invariant(self, fig_records, fig_catalog):
        shuffled = list(fig_records)
        random.Random(3).shuffle(shuffled)
        a = build_general_matrix(fig_records, fig_catalog).counts
        b = build_general_matrix(shuffled, fig_catalog).counts
        np.testing.assert_array_equal(a, b)

    def test_uuc_breakdown(self, fig_records, fig_catalog):
        b = per_uuc_class_breakdown(fig_records, fig_catalog)
        assert sum(v["rejected"] for v in b.values()) == 10
        assert sum(v["accepted"] for v in b.values()) == 5


general_matrices = st.integers(2, 5).flatmap(
    lambda k: st.lists(st.integers(0, 6), min_size=(k + 1) ** 2, max_size=(k + 1) ** 2).map(
        lambda cells: np.array(cells).reshape(k + 1, k + 1)))


@settings(max_examples=1000, deadline=None)
@given(general_matrices)
def test_round_trip(counts):
    k = counts.shape[0] - 1
    labels = tuple(f"k{i}" for i in range(k))
    cat = ClassCatalog(labels, ("u0", "u1"))
    g = GeneralConfusionMatrix(counts, labels)
    rebuilt = build_general_matrix(records_from_matrix(g, cat.uuc_labels), cat)
    np.testing.assert_array_equal(rebuilt.counts, counts)
