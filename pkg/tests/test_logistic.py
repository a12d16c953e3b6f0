import math

import numpy as np
import pytest

from oracles import logistic_mle_optimizer

from lesionkit.errors import RankDeficient, Separation, SingleClass
from lesionkit.logistic import (
    fit_logistic,
    fit_multivariable,
    screen_univariable,
)


def counts_design(n00, n01, n10, n11):
    """Rows x=0 (n00 with y=0, n01 with y=1) and x=1 (n10, n11)."""
    x = np.concatenate([np.zeros(n00 + n01), np.ones(n10 + n11)])
    y = np.concatenate([np.zeros(n00), np.ones(n01), np.zeros(n10), np.ones(n11)])
    return x[:, None], y


class TestFitLogistic:
    def test_two_by_two_closed_form(self):
        X, y = counts_design(10, 20, 20, 10)
        model = fit_logistic(X, y, names=["x"])
        want_or = (10 * 10) / (20 * 20)
        assert model.stats[1].odds_ratio == pytest.approx(want_or, abs=1e-9)
        assert model.coefficients[0] == pytest.approx(math.log(want_or), abs=1e-9)

    def test_matches_generic_optimizer(self, rng):
        for _ in range(10):
            n = int(rng.integers(40, 120))
            p = int(rng.integers(1, 4))
            X = rng.normal(size=(n, p))
            beta = rng.normal(0, 0.8, size=p)
            probs = 1.0 / (1.0 + np.exp(-(X @ beta - 0.2)))
            y = (rng.uniform(size=n) < probs).astype(float)
            if y.sum() < 5 or (1 - y).sum() < 5:
                continue
            model = fit_logistic(X, y)
            oracle = logistic_mle_optimizer(X, y)
            assert model.intercept == pytest.approx(oracle[0], abs=1e-6)
            np.testing.assert_allclose(model.coefficients, oracle[1:], atol=1e-6)

    def test_null_covers_one(self, rng):
        hits = 0
        for _ in range(100):
            x = rng.normal(size=2000)
            y = rng.integers(0, 2, size=2000).astype(float)
            model = fit_logistic(x[:, None], y)
            s = model.stats[1]
            hits += s.ci_low <= 1.0 <= s.ci_high
        assert hits >= 93

    def test_separation_detected(self):
        x = np.array([-2.0, -1.5, -1.0, 1.0, 1.5, 2.0])
        y = np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
        with pytest.raises(Separation):
            fit_logistic(x[:, None], y)

    def test_rank_deficiency_detected(self, rng):
        x = rng.normal(size=40)
        X = np.column_stack([x, 2.0 * x])
        y = (x + rng.normal(0, 1, 40) > 0).astype(float)
        with pytest.raises(RankDeficient):
            fit_logistic(X, y)

    def test_single_class_rejected(self):
        with pytest.raises(SingleClass):
            fit_logistic(np.arange(5.0)[:, None], np.ones(5))

    def test_covariance_symmetric_psd(self, rng):
        X = rng.normal(size=(80, 3))
        y = (X[:, 0] + rng.normal(0, 1.5, 80) > 0).astype(float)
        model = fit_logistic(X, y)
        cov = model.covariance
        np.testing.assert_allclose(cov, cov.T, atol=1e-12)
        assert np.all(np.linalg.eigvalsh(cov) > -1e-12)

    def test_wald_p_matches_normal_cdf(self, rng):
        X = rng.normal(size=(100, 2))
        y = (X[:, 0] + rng.normal(0, 1.0, 100) > 0).astype(float)
        model = fit_logistic(X, y)
        for s in model.stats:
            want = math.erfc(abs(s.z) / math.sqrt(2.0))
            assert s.p == pytest.approx(want, abs=1e-12)
            assert s.ci_low <= s.odds_ratio <= s.ci_high


class TestScreenUnivariable:
    def test_perfect_predictor_not_computable(self):
        y = np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
        results = screen_univariable(["p"], y[:, None] * 2.0 - 1.0, y)
        assert not results[0].computable
        assert results[0].reason == "Separation"

    def test_constant_predictor_excluded(self, rng):
        y = rng.integers(0, 2, size=30).astype(float)
        y[:4] = [0, 0, 1, 1]
        results = screen_univariable(["c"], np.full((30, 1), 7.0), y)
        assert not results[0].computable
        assert not results[0].kept

    def test_true_signal_kept(self, rng):
        kept = 0
        for _ in range(100):
            x = rng.integers(0, 2, size=900).astype(float)
            logit = math.log(2.0) * x - 0.3
            y = (rng.uniform(size=900) < 1.0 / (1.0 + np.exp(-logit))).astype(float)
            res = screen_univariable(["x"], x[:, None], y)[0]
            kept += res.computable and res.kept
        assert kept >= 95


class TestFitMultivariable:
    def test_noise_dropped_signal_retained(self, rng):
        good = 0
        for _ in range(20):
            n = 400
            strong = rng.normal(size=n)
            noise = rng.normal(size=n)
            y = (rng.uniform(size=n) < 1.0 / (1.0 + np.exp(-1.5 * strong))).astype(float)
            model, steps = fit_multivariable(["strong", "noise"], np.column_stack([strong, noise]), y)
            if model.predictors == ["strong"] and steps and steps[0].dropped == "noise":
                good += 1
            elif model.predictors == ["strong", "noise"]:
                pass  # noise slipped under alpha this draw
        assert good >= 18

    def test_all_strong_no_drops(self, rng):
        n = 500
        X = rng.normal(size=(n, 3))
        logit = X @ np.array([1.2, -1.0, 0.9])
        y = (rng.uniform(size=n) < 1.0 / (1.0 + np.exp(-logit))).astype(float)
        model, steps = fit_multivariable(["a", "b", "c"], X, y)
        assert model.predictors == ["a", "b", "c"]
        assert steps == []

    def test_duplicates_raise_before_elimination(self, rng):
        x = rng.normal(size=60)
        y = (x + rng.normal(0, 1, 60) > 0).astype(float)
        with pytest.raises(RankDeficient):
            fit_multivariable(["a", "a2"], np.column_stack([x, x]), y)

    def test_all_dropped_reported(self, rng):
        n = 300
        X = rng.normal(size=(n, 2))
        y = rng.integers(0, 2, size=n).astype(float)
        model, steps = fit_multivariable(["a", "b"], X, y)
        if model.all_dropped:
            assert len(steps) == 2
            assert model.predictors == []

    def test_terminates_within_predictor_count(self, rng):
        n = 300
        X = rng.normal(size=(n, 5))
        y = rng.integers(0, 2, size=n).astype(float)
        _, steps = fit_multivariable(list("abcde"), X, y)
        assert len(steps) <= 5
