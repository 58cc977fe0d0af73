import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osreval._seeding import SplitMix64Stream, derive_seed, derive_seed_array, splitmix64
from osreval.protocol import (
    InsufficientClasses,
    InvalidCount,
    OpennessConfig,
    SplitPlan,
    enumerate_configs,
    holdout_plan,
    openness,
    outlier_plan,
)

LABELS = [str(i) for i in range(10)]
CONFIGS = [(2, 8), (3, 4), (5, 5), (6, 4), (8, 2)]


def openness_direct(n_train, n_test):
    return 1 - math.sqrt(2 * n_train / (n_train + n_test))


class TestOpenness:
    def test_table_values(self):
        assert openness(2, 8) == pytest.approx(0.4226, abs=5e-4)
        assert openness(8, 6) == pytest.approx(0.1472, abs=5e-4)
        assert openness(7, 5) == pytest.approx(0.142, abs=5e-4)
        assert openness(7, 8) == pytest.approx(0.202, abs=5e-4)

    @pytest.mark.parametrize("k", [1, 2, 7, 100])
    def test_closed(self, k):
        assert openness(k, 0) == 0.0

    def test_errors(self):
        with pytest.raises(InvalidCount):
            openness(0, 3)
        with pytest.raises(InvalidCount):
            openness(3, -1)

    @settings(max_examples=300)
    @given(st.integers(1, 500), st.integers(0, 5000))
    def test_bounds_and_formula(self, k, u):
        o = openness(k, u)
        assert 0 <= o < 1
        assert o == pytest.approx(openness_direct(k, k + u), abs=1e-12)
        assert openness(k, u + 1) > o

    def test_decreasing_in_kkc(self):
        values = [openness(k, 10) for k in range(1, 50)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestEnumerateConfigs:
    def test_minimal_grid(self):
        cfgs = enumerate_configs(2, 2)
        assert cfgs == [OpennessConfig(2, 2)]
        assert cfgs[0].openness == pytest.approx(1 - math.sqrt(4 / 6), abs=5e-4)

    def test_budget(self):
        cfgs = enumerate_configs(dataset_class_budget=10)
        pairs = {(c.n_kkc, c.n_uuc) for c in cfgs}
        expected = {(k, u) for k in range(1, 10) for u in range(1, 10) if k + u <= 10}
        assert pairs == expected

    def test_sorted(self):
        cfgs = enumerate_configs(6, 6)
        keys = [(c.openness, c.n_kkc) for c in cfgs]
        assert keys == sorted(keys)


class TestSeeding:
    def test_splitmix_reference(self):
        # first outputs of Vigna's splitmix64.c seeded with 0
        s = SplitMix64Stream(0)
        assert [s.next_u64() for _ in range(3)] == [
            0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
        assert splitmix64(0) == 0xE220A8397B1DCDAF

    def test_vectorized_matches_scalar(self):
        c = np.arange(50, dtype=np.uint64)
        vec = derive_seed_array(123, ["x", 4], c, ["pos"])
        assert [int(v) for v in vec] == [derive_seed(123, "x", 4, i, "pos") for i in range(50)]

    def test_randbelow_uniform(self):
        s = SplitMix64Stream(7)
        counts = np.bincount([s.randbelow(5) for _ in range(20000)], minlength=5)
        assert counts.min() > 3700 and counts.max() < 4300


class TestHoldout:
    def test_25_entries(self):
        plan = holdout_plan(LABELS, CONFIGS, 5, 2, seed=1)
        assert len(plan) == 25
        for e in plan.entries:
            assert len(e.kkc_labels) == e.config.n_kkc
            assert len(e.uuc_labels) == e.config.n_uuc
            assert not set(e.kkc_labels) & set(e.uuc_labels)
            assert set(e.kkc_labels) | set(e.uuc_labels) <= set(LABELS)

    def test_closed_config(self):
        plan = holdout_plan(LABELS, [(10, 0)], 1, 2, seed=0)
        (e,) = plan.entries
        assert e.uuc_labels == () and e.config.openness == 0.0
        assert sorted(e.kkc_labels) == sorted(LABELS)

    def test_deterministic(self):
        a = holdout_plan(LABELS, CONFIGS, 5, 2, seed=42).to_json()
        b = holdout_plan(LABELS, CONFIGS, 5, 2, seed=42).to_json()
        assert a == b

    def test_seeds_differ(self):
        ref = holdout_plan(LABELS, CONFIGS, 5, 2, seed=0).to_dict()["entries"]
        differing = 0
        for seed in range(1, 101):
            other = holdout_plan(LABELS, CONFIGS, 5, 2, seed=seed).to_dict()["entries"]
            differing += any(
                (x["kkc_labels"], x["uuc_labels"]) != (y["kkc_labels"], y["uuc_labels"])
                for x, y in zip(ref, other))
        assert differing == 100

    def test_entries_independent_of_other_configs(self):
        a = holdout_plan(LABELS, [(2, 8), (3, 4)], 3, 2, seed=5)
        b = holdout_plan(LABELS, [(2, 8)], 3, 2, seed=5)
        assert a.entries[:3] == b.entries

    def test_insufficient(self):
        with pytest.raises(InsufficientClasses):
            holdout_plan(LABELS, [(6, 5)], 1, 2, 0)

    def test_uniform_draw(self):
        # every label should be known in about n_kkc / n_labels of the draws
        plan = holdout_plan(LABELS, [(3, 2)], 3000, 2, seed=9)
        counts = {c: 0 for c in LABELS}
        for e in plan.entries:
            for c in e.kkc_labels:
                counts[c] += 1
        expected = 3000 * 3 / 10
        assert all(abs(v - expected) < 5 * math.sqrt(expected) for v in counts.values())

    def test_roundtrip_json(self):
        plan = holdout_plan(LABELS, CONFIGS, 2, 2, seed=3, class_sizes={c: 7 for c in LABELS})
        back = SplitPlan.from_dict(json.loads(plan.to_json()))
        assert back.to_json() == plan.to_json()


class TestFolds:
    def test_stratified_and_consistent(self):
        sizes = {c: 9 for c in LABELS}
        plan = holdout_plan(LABELS, [(4, 3)], 2, 3, seed=11, class_sizes=sizes)
        e = plan.entries[0]
        y = np.repeat(LABELS, 9)
        assigned = e.assign_folds(y, 3)
        for c in LABELS:
            f = assigned[y == c]
            if c in e.kkc_labels or c in e.uuc_labels:
                assert np.bincount(f, minlength=3).tolist() == [3, 3, 3]
                assert f.tolist() == list(e.fold_assignments[c])
            else:
                assert (f == -1).all()

    def test_train_has_only_known(self):
        plan = holdout_plan(LABELS, [(4, 3)], 1, 2, seed=2)
        e = plan.entries[0]
        y = np.repeat(LABELS, 10)
        for fold in range(2):
            train, test = e.train_test_indices(y, 2, fold)
            assert set(y[train]) == set(e.kkc_labels)
            assert set(y[test]) == set(e.kkc_labels) | set(e.uuc_labels)
            assert not set(train) & set(test)
        t0 = e.train_test_indices(y, 2, 0)[1]
        t1 = e.train_test_indices(y, 2, 1)[1]
        assert len(t0) + len(t1) == 70


class TestOutlier:
    def test_sources(self):
        cifar = [f"cifar:{i}" for i in range(10)]
        svhn = [f"svhn:{i}" for i in range(10)]
        plan = outlier_plan(cifar, svhn, [(7, 5)], 1, 2, seed=0)
        (e,) = plan.entries
        assert len(e.kkc_labels) == 7 and set(e.kkc_labels) <= set(cifar)
        assert len(e.uuc_labels) == 5 and set(e.uuc_labels) <= set(svhn)

    def test_minimal(self):
        plan = outlier_plan(["a"], ["b"], [(1, 1)], 1, 2, seed=0)
        assert plan.entries[0].kkc_labels == ("a",) and plan.entries[0].uuc_labels == ("b",)

    def test_deterministic(self):
        a = outlier_plan(LABELS, list("abcdefgh"), [(3, 4)], 5, 2, seed=8).to_json()
        assert a == outlier_plan(LABELS, list("abcdefgh"), [(3, 4)], 5, 2, seed=8).to_json()

    def test_overlapping_sources(self):
        with pytest.raises(InsufficientClasses):
            outlier_plan(LABELS, LABELS, [(2, 2)], 1, 2, 0)

    def test_insufficient(self):
        with pytest.raises(InsufficientClasses):
            outlier_plan(["a", "b"], ["c"], [(2, 2)], 1, 2, 0)
