"""Maximum-likelihood logistic regression with Wald inference.

Fitting is iteratively reweighted least squares, converged when every
score (gradient) component falls below 1e-8. The coefficient covariance
is the inverse observed information at the optimum, which feeds the
odds-ratio confidence intervals and Wald p-values reported alongside
each predictor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import NonConvergence, RankDeficient, Separation, SingleClass

MAX_ITER = 100
SCORE_TOLERANCE = 1e-8
SEPARATION_NORM = 50.0


@dataclass(frozen=True)
class CoefficientStats:
    name: str
    beta: float
    se: float
    z: float
    p: float
    odds_ratio: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class LogisticModel:
    predictors: list[str]
    intercept: float
    coefficients: np.ndarray
    covariance: np.ndarray          # (p+1, p+1), intercept first
    n: int
    events: int
    stats: tuple[CoefficientStats, ...]

    @property
    def all_dropped(self) -> bool:
        return len(self.predictors) == 0

    def linear_predictor(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self.intercept + X @ self.coefficients

    def predict_probability(self, X: np.ndarray) -> np.ndarray:
        return 1.0 / (1.0 + np.exp(-self.linear_predictor(X)))


def _wald_stats(names, beta, cov) -> tuple[CoefficientStats, ...]:
    out = []
    se = np.sqrt(np.diag(cov))
    for i, name in enumerate(["(intercept)"] + list(names)):
        b = float(beta[i])
        s = float(se[i])
        z = b / s if s > 0 else 0.0
        p = float(2.0 * norm.sf(abs(z)))
        out.append(CoefficientStats(
            name=name, beta=b, se=s, z=float(z), p=p,
            odds_ratio=math.exp(b),
            ci_low=math.exp(b - 1.96 * s),
            ci_high=math.exp(b + 1.96 * s),
        ))
    return tuple(out)


def _loglik(eta: np.ndarray, y: np.ndarray) -> float:
    return float(y @ eta - np.sum(np.logaddexp(0.0, eta)))


def fit_logistic(X: np.ndarray, y: np.ndarray, names: list[str] | None = None) -> LogisticModel:
    """IRLS fit; raises Separation instead of returning a divergent fit."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.ndim == 2 and X.shape[0] == 1 and len(y) > 1:
        X = X.T
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if names is None:
        names = [f"x{j}" for j in range(p)]
    if y.sum() < 2 or (1 - y).sum() < 2:
        raise SingleClass("need at least two rows per class")

    Xd = np.column_stack([np.ones(n), X])
    if np.linalg.matrix_rank(Xd) < Xd.shape[1]:
        raise RankDeficient("design matrix is not full column rank")

    col_sd = X.std(axis=0, ddof=0)
    col_sd = np.where(col_sd == 0.0, 1.0, col_sd)

    beta = np.zeros(p + 1)
    beta[0] = math.log(y.mean() / (1.0 - y.mean()))
    eta = Xd @ beta
    ll = _loglik(eta, y)
    info = None
    for _ in range(MAX_ITER):
        prob = 1.0 / (1.0 + np.exp(-eta))
        score = Xd.T @ (y - prob)
        if np.max(np.abs(score)) < SCORE_TOLERANCE:
            # a fit whose linear predictor splits the classes exactly only
            # "converges" through numeric saturation: the true MLE diverges
            if p > 0 and float(eta[y == 1].min()) > float(eta[y == 0].max()):
                raise Separation("classes are perfectly separable")
            w = prob * (1.0 - prob)
            info = Xd.T @ (w[:, None] * Xd)
            break
        w = np.maximum(prob * (1.0 - prob), 1e-12)
        info = Xd.T @ (w[:, None] * Xd)
        try:
            delta = np.linalg.solve(info, score)
        except np.linalg.LinAlgError as exc:
            raise Separation("information matrix collapsed (likely separation)") from exc
        step = 1.0
        for _ in range(30):
            cand = beta + step * delta
            cand_ll = _loglik(Xd @ cand, y)
            if cand_ll >= ll - 1e-12:
                break
            step /= 2.0
        beta = beta + step * delta
        eta = Xd @ beta
        ll = _loglik(eta, y)
        if float(np.linalg.norm(beta[1:] * col_sd)) > SEPARATION_NORM:
            raise Separation("coefficients diverging; classes are separable")
    else:
        raise NonConvergence(f"IRLS did not converge in {MAX_ITER} iterations")

    try:
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError as exc:
        raise Separation("observed information is singular at the optimum") from exc
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    if np.any(np.abs(beta) + 1.96 * se > 700.0):
        # zero-count cell: the coefficient has no finite MLE (quasi-separation)
        raise Separation("a coefficient is unbounded (zero-count cell pattern)")
    return LogisticModel(
        predictors=list(names),
        intercept=float(beta[0]),
        coefficients=beta[1:].copy(),
        covariance=cov,
        n=n,
        events=int(y.sum()),
        stats=_wald_stats(names, beta, cov),
    )


@dataclass(frozen=True)
class UnivariableResult:
    name: str
    computable: bool
    reason: str | None
    odds_ratio: float | None
    ci_low: float | None
    ci_high: float | None
    p: float | None
    kept: bool


def screen_univariable(
    names: list[str], X: np.ndarray, y: np.ndarray, alpha: float = 0.05
) -> list[UnivariableResult]:
    """One single-predictor fit per column; keep p < alpha.

    Columns that cannot be fitted (constant, separable) are reported as
    not computable rather than raised.
    """
    X = np.asarray(X, dtype=float)
    results = []
    for j, name in enumerate(names):
        col = X[:, j]
        if np.ptp(col) == 0.0:
            results.append(UnivariableResult(
                name=name, computable=False, reason="constant predictor",
                odds_ratio=None, ci_low=None, ci_high=None, p=None, kept=False,
            ))
            continue
        try:
            model = fit_logistic(col[:, None], y, names=[name])
        except (Separation, RankDeficient, NonConvergence) as exc:
            results.append(UnivariableResult(
                name=name, computable=False, reason=type(exc).__name__,
                odds_ratio=None, ci_low=None, ci_high=None, p=None, kept=False,
            ))
            continue
        stat = model.stats[1]
        results.append(UnivariableResult(
            name=name, computable=True, reason=None,
            odds_ratio=stat.odds_ratio, ci_low=stat.ci_low, ci_high=stat.ci_high,
            p=stat.p, kept=bool(stat.p < alpha),
        ))
    return results


@dataclass(frozen=True)
class EliminationStep:
    dropped: str
    p: float


def fit_multivariable(
    names: list[str], X: np.ndarray, y: np.ndarray, alpha: float = 0.05
) -> tuple[LogisticModel, list[EliminationStep]]:
    """Backward elimination: drop the worst p >= alpha predictor, refit.

    Returns the final model (intercept-only when everything drops out,
    flagged via model.all_dropped) plus the elimination trail. Rank
    deficiency among the starting predictors is raised before any
    elimination happens.
    """
    if not names:
        raise ValueError("kept predictor set must be non-empty")
    X = np.asarray(X, dtype=float)
    Xd = np.column_stack([np.ones(len(X)), X])
    if np.linalg.matrix_rank(Xd) < Xd.shape[1]:
        raise RankDeficient("starting predictors are collinear")

    current = list(names)
    steps: list[EliminationStep] = []
    for _ in range(len(names)):
        idx = [names.index(n) for n in current]
        model = fit_logistic(X[:, idx], y, names=current)
        slope_stats = model.stats[1:]
        worst = max(slope_stats, key=lambda s: s.p)
        if worst.p < alpha:
            return model, steps
        steps.append(EliminationStep(dropped=worst.name, p=worst.p))
        current.remove(worst.name)
        if not current:
            break

    intercept_only = _intercept_only_model(y)
    return intercept_only, steps


def _intercept_only_model(y: np.ndarray) -> LogisticModel:
    y = np.asarray(y, dtype=float)
    n = len(y)
    p_hat = y.mean()
    beta0 = math.log(p_hat / (1.0 - p_hat))
    info = np.array([[n * p_hat * (1.0 - p_hat)]])
    cov = np.linalg.inv(info)
    return LogisticModel(
        predictors=[],
        intercept=float(beta0),
        coefficients=np.zeros(0),
        covariance=cov,
        n=n,
        events=int(y.sum()),
        stats=_wald_stats([], np.array([beta0]), cov),
    )
