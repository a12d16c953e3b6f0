import numpy as np
import pytest

from oracles import icc_two_way_anova, pairwise_auc

from lesionkit.errors import ShapeMismatch
from lesionkit.selection import (
    FeatureMatrix,
    collinearity_prune,
    icc_filter,
    icc_two_way_single,
    univariable_auc,
)


def matrix(names, values, labels=None):
    return FeatureMatrix(names=names, values=np.asarray(values, dtype=float), labels=labels)


class TestIcc:
    def test_identical_raters_give_one(self):
        a = matrix(["f"], np.arange(10.0)[:, None])
        report = icc_filter(a, a, threshold=0.85)
        assert report.entries[0].icc == pytest.approx(1.0)
        assert report.entries[0].kept

    def test_independent_noise_near_zero(self, rng):
        # estimator sd ~ 1/sqrt(n); n=2000 keeps the +-0.1 band safe
        a = matrix(["f"], rng.normal(size=(2000, 1)))
        b = matrix(["f"], rng.normal(size=(2000, 1)))
        report = icc_filter(a, b)
        assert abs(report.entries[0].icc) < 0.1
        assert not report.entries[0].kept

    def test_worked_anova_example(self):
        # six subjects, two raters, hand-checkable mean squares
        ra = np.array([9.0, 6.0, 8.0, 7.0, 10.0, 6.0])
        rb = np.array([2.0, 1.0, 4.0, 1.0, 5.0, 2.0])
        got, *_ = icc_two_way_single(np.column_stack([ra, rb]))
        want = icc_two_way_anova(ra, rb)
        assert got == pytest.approx(want, abs=1e-9)

    def test_symmetric_in_rater_order(self, rng):
        a = matrix(["f", "g"], rng.normal(size=(40, 2)))
        b = matrix(["f", "g"], rng.normal(size=(40, 2)) + a.values * 2.0)
        r1 = icc_filter(a, b)
        r2 = icc_filter(b, a)
        for e1, e2 in zip(r1.entries, r2.entries):
            assert e1.icc == pytest.approx(e2.icc, abs=1e-12)
            assert e1.kept == e2.kept

    def test_constant_feature_not_kept(self):
        a = matrix(["f"], np.full((20, 1), 3.0))
        report = icc_filter(a, a)
        assert report.entries[0].icc is None
        assert not report.entries[0].kept

    def test_shape_mismatch(self, rng):
        a = matrix(["f"], rng.normal(size=(10, 1)))
        b = matrix(["g"], rng.normal(size=(10, 1)))
        with pytest.raises(ShapeMismatch):
            icc_filter(a, b)


class TestUnivariableAuc:
    def test_perfect_separator(self):
        labels = np.array([0, 0, 0, 1, 1, 1])
        assert univariable_auc(np.arange(6.0), labels) == 1.0

    def test_constant_feature_is_chance(self):
        assert univariable_auc(np.full(10, 2.0), np.array([0, 1] * 5)) == 0.5

    def test_orientation_corrected(self):
        labels = np.array([0, 0, 0, 1, 1, 1])
        assert univariable_auc(-np.arange(6.0), labels) == 1.0

    def test_random_feature_near_half(self, rng):
        labels = rng.integers(0, 2, size=1000)
        labels[:2] = [0, 1]
        feature = rng.normal(size=1000)
        auc = univariable_auc(feature, labels)
        assert 0.5 <= auc <= 0.55
        raw = pairwise_auc(feature, labels)
        assert auc == pytest.approx(max(raw, 1.0 - raw), abs=1e-12)


class TestCollinearityPrune:
    def test_duplicate_drops_lower_auc(self, rng):
        base = rng.normal(size=60)
        labels = (base + rng.normal(0, 0.5, 60) > 0).astype(int)
        m = matrix(["good", "copy"], np.column_stack([base, base]), labels)
        aucs = {"good": 0.8, "copy": 0.6}
        result = collinearity_prune(m, 0.85, aucs)
        assert result.kept == ["good"]
        assert result.dropped_pairs[0].dropped == "copy"

    def test_three_way_cluster_keeps_best(self, rng):
        base = rng.normal(size=300)
        cols = np.column_stack([
            base + rng.normal(0, 0.1, 300),
            base + rng.normal(0, 0.1, 300),
            base + rng.normal(0, 0.1, 300),
        ])
        m = matrix(["a", "b", "c"], cols)
        result = collinearity_prune(m, 0.85, {"a": 0.6, "b": 0.7, "c": 0.8})
        assert result.kept == ["c"]

    def test_uncorrelated_untouched(self, rng):
        m = matrix(["a", "b", "c"], rng.normal(size=(200, 3)))
        result = collinearity_prune(m, 0.85, {"a": 0.6, "b": 0.7, "c": 0.8})
        assert result.kept == ["a", "b", "c"]
        assert result.dropped_pairs == ()

    def test_no_residual_collinearity(self, rng):
        base = rng.normal(size=(150, 3))
        extra = base @ rng.normal(size=(3, 5)) + rng.normal(0, 0.3, size=(150, 5))
        values = np.column_stack([base, extra])
        names = [f"f{i}" for i in range(8)]
        aucs = {n: 0.5 + 0.05 * i for i, n in enumerate(names)}
        result = collinearity_prune(matrix(names, values), 0.85, aucs)
        idx = [names.index(n) for n in result.kept]
        r = np.corrcoef(values[:, idx], rowvar=False)
        np.fill_diagonal(r, 0.0)
        assert np.abs(r).max() <= 0.85

    def test_auc_tie_breaks_lexicographically(self, rng):
        base = rng.normal(size=50)
        m = matrix(["zeta", "alpha"], np.column_stack([base, base]))
        result = collinearity_prune(m, 0.85, {"zeta": 0.7, "alpha": 0.7})
        assert result.kept == ["alpha"]

    def test_never_increases_feature_count(self, rng):
        values = rng.normal(size=(80, 6))
        values[:, 3] = values[:, 0] * 0.99 + rng.normal(0, 0.01, 80)
        names = list("abcdef")
        m = matrix(names, values)
        aucs = {n: 0.6 for n in names}
        result = collinearity_prune(m, 0.85, aucs)
        assert len(result.kept) <= 6
