import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osreval.core import UNKNOWN, ClassCatalog
from osreval.recognizers import (
    CentroidModel,
    EmptyClass,
    InvalidShape,
    fit_centroid_model,
    generate_blobs,
    predict_open,
    predict_records,
    read_features_csv,
    tune_threshold,
    write_dataset_csv,
)
from osreval.scores import score_suite


def pairwise(means):
    d = np.linalg.norm(means[:, None] - means[None], axis=-1)
    return d[np.triu_indices(len(means), 1)]


class TestBlobs:
    def test_shape_and_separation(self):
        ds = generate_blobs(4, 2, 50, separation=8, seed=0)
        assert ds.X.shape == (200, 2) and len(ds.y) == 200
        assert pairwise(ds.class_means).min() >= 8.0 - 1e-9
        for label in ds.labels:
            assert (ds.y == label).sum() == 50

    def test_simplex_equidistant(self):
        ds = generate_blobs(5, 8, 3, separation=8, seed=1, spread=2.0)
        np.testing.assert_allclose(pairwise(ds.class_means), 16.0)

    def test_empty(self):
        ds = generate_blobs(3, 2, 0, seed=0)
        assert len(ds) == 0 and ds.X.shape == (0, 2)

    def test_deterministic(self):
        a, b = generate_blobs(4, 3, 10, seed=5), generate_blobs(4, 3, 10, seed=5)
        np.testing.assert_array_equal(a.X, b.X)
        assert not np.array_equal(a.X, generate_blobs(4, 3, 10, seed=6).X)

    def test_invalid(self):
        with pytest.raises(InvalidShape):
            generate_blobs(1, 2, 10)
        with pytest.raises(InvalidShape):
            generate_blobs(3, 0, 10)

    def test_csv_roundtrip(self, tmp_path):
        ds = generate_blobs(3, 4, 5, seed=2)
        write_dataset_csv(ds, tmp_path / "d.csv")
        X, y = read_features_csv(tmp_path / "d.csv")
        np.testing.assert_array_equal(X, ds.X)
        assert list(y) == list(ds.y)


class TestFit:
    def test_single_sample(self):
        X = np.array([[1.0, 2.0], [3.0, -1.0]])
        m = fit_centroid_model(X, ["a", "b"])
        np.testing.assert_array_equal(m.centroids, X)

    def test_identical_classes_warn(self):
        X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 0.0], [1.0, 1.0]])
        with pytest.warns(RuntimeWarning):
            m = fit_centroid_model(X, ["a", "a", "b", "b"])
        np.testing.assert_array_equal(m.centroids[0], m.centroids[1])

    def test_empty_class(self):
        with pytest.raises(EmptyClass):
            fit_centroid_model(np.zeros((2, 2)), ["a", "a"], kkc_labels=["a", "b"])

    def test_ignores_other_labels(self):
        X = np.array([[0.0], [2.0], [100.0]])
        m = fit_centroid_model(X, ["a", "a", "z"], kkc_labels=["a"])
        assert m.centroids.tolist() == [[1.0]]

    def test_standard_error(self):
        n = 200
        ds = generate_blobs(3, 5, n, separation=8, seed=3)
        m = fit_centroid_model(ds.X, ds.y)
        for i, label in enumerate(m.labels):
            true = ds.class_means[ds.labels.index(label)]
            # per-coordinate error bound 3 * sigma / sqrt(n)
            assert np.abs(m.centroids[i] - true).max() <= 3 * ds.spread / np.sqrt(n) * 1.5


class TestPredict:
    model = CentroidModel(("a", "b", "c"), np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]]),
                          temperature=1.0, threshold=0.5)

    def test_at_centroid(self):
        o, c, s = predict_open(self.model, np.array([10.0, 0.0]))
        assert o == c == "b"
        assert sum(s) == pytest.approx(1.0)

    def test_equidistant(self):
        m = CentroidModel(("a", "b"), np.array([[-1.0, 0.0], [1.0, 0.0]]), 1.0, 0.6)
        o, c, s = predict_open(m, np.array([0.0, 5.0]))
        assert s == pytest.approx((0.5, 0.5))
        assert o == UNKNOWN and c == "a"

    def test_threshold_zero_never_rejects(self):
        X = np.random.default_rng(0).normal(0, 20, size=(300, 2))
        o, c, _ = self.model.with_threshold(0.0).predict(X)
        assert o == c

    def test_records(self):
        X = np.array([[0.1, 0.0], [5.0, 5.0]])
        recs = predict_records(self.model.with_threshold(0.9), X, ["a", "x"])
        assert recs[0].open_pred == "a"
        assert recs[1].open_pred == UNKNOWN and recs[1].closed_pred is not None


points = st.lists(st.tuples(st.floats(-30, 30), st.floats(-30, 30)), min_size=1, max_size=20)


@settings(max_examples=1000, deadline=None)
@given(points, st.floats(0, 1), st.floats(0, 1), st.floats(0.1, 10))
def test_monotone_rejection(pts, t1, t2, temperature):
    lo, hi = sorted((t1, t2))
    model = CentroidModel(("a", "b", "c"), np.array([[0.0, 0.0], [6.0, 1.0], [-2.0, 7.0]]),
                          temperature, lo)
    X = np.array(pts)
    o_lo, c_lo, s = model.predict(X)
    o_hi, c_hi, _ = model.with_threshold(hi).predict(X)
    assert c_lo == c_hi
    for a, b in zip(o_lo, o_hi):
        assert not (a == UNKNOWN and b != UNKNOWN)
    assert (s >= 0).all()
    np.testing.assert_allclose(s.sum(axis=1), 1.0, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(points, st.floats(0.1, 50), st.floats(0.2, 5))
def test_scale_invariance(pts, scale, temperature):
    cents = np.array([[0.0, 0.0], [6.0, 1.0], [-2.0, 7.0]])
    a = CentroidModel(("a", "b", "c"), cents, temperature, 0.5)
    b = CentroidModel(("a", "b", "c"), cents * scale, temperature * scale, 0.5)
    X = np.array(pts)
    oa, ca, sa = a.predict(X)
    ob, cb, sb = b.predict(X * scale)
    np.testing.assert_allclose(sa, sb, atol=1e-9)
    assert ca == cb
    # threshold comparisons can only differ at exact float ties
    mismatch = [i for i, (x, y) in enumerate(zip(oa, ob)) if x != y]
    assert all(abs(sa[i].max() - 0.5) < 1e-9 for i in mismatch)


def test_tune_threshold_prefers_rejection_room():
    ds = generate_blobs(4, 8, 100, seed=4)
    m = fit_centroid_model(ds.X, ds.y)
    t = tune_threshold(m, ds.X, ds.y)
    assert 0.5 < t < 1.0
    loose = tune_threshold(m, ds.X, ds.y, tolerance=0.0)
    assert loose <= t


def test_end_to_end_sanity():
    ds = generate_blobs(5, 12, 120, separation=8, seed=10)
    kkc, uuc = ds.labels[:4], ds.labels[4:]
    known = np.isin(ds.y, kkc)
    idx = np.flatnonzero(known)
    rng = np.random.default_rng(0)
    rng.shuffle(idx)
    fit, val, test_known = idx[:200], idx[200:300], idx[300:]
    test = np.concatenate([test_known, np.flatnonzero(~known)])
    model = fit_centroid_model(ds.X[fit], ds.y[fit], kkc)
    model = model.with_threshold(tune_threshold(model, ds.X[val], ds.y[val]))
    s = score_suite(predict_records(model, ds.X[test], ds.y[test]), ClassCatalog(kkc, uuc))
    assert s.outer >= 0.9
    assert s.inner >= 0.95
