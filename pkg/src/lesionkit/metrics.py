"""Binary-classifier evaluation: confusion metrics, ROC/AUC, DeLong tests.

AUC is the tied-rank Mann-Whitney statistic (trapezoid over the empirical
curve). Variances and paired comparisons use the structural components of
the placement values, with a two-sided normal reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, rankdata

from .errors import ShapeMismatch, SingleClass


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        counts = (self.tp, self.fp, self.tn, self.fn)
        if any(c < 0 for c in counts):
            raise ValueError("confusion counts must be non-negative")
        if sum(counts) == 0:
            raise ValueError("empty confusion matrix")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            self.tp + other.tp, self.fp + other.fp,
            self.tn + other.tn, self.fn + other.fn,
        )


def confusion_from_predictions(pred: np.ndarray, truth: np.ndarray) -> ConfusionMatrix:
    pred = np.asarray(pred, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if pred.shape != truth.shape:
        raise ShapeMismatch("prediction/truth length mismatch")
    return ConfusionMatrix(
        tp=int(np.sum(pred & truth)),
        fp=int(np.sum(pred & ~truth)),
        tn=int(np.sum(~pred & ~truth)),
        fn=int(np.sum(~pred & truth)),
    )


def binary_metrics(cm: ConfusionMatrix) -> tuple[float, float, float, float]:
    """(sensitivity, specificity, accuracy, mcc); mcc is 0 when undefined."""
    tp, fp, tn, fn = cm.tp, cm.fp, cm.tn, cm.fn
    sen = tp / (tp + fn) if tp + fn else 0.0
    spec = tn / (tn + fp) if tn + fp else 0.0
    acc = (tp + tn) / cm.total
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    mcc = (tp * tn - fp * fn) / math.sqrt(denom) if denom else 0.0
    return sen, spec, acc, mcc


@dataclass(frozen=True)
class RocCurve:
    thresholds: np.ndarray          # distinct scores, descending
    fpr: np.ndarray                 # includes (0,0) and (1,1)
    tpr: np.ndarray
    auc: float
    n_pos: int
    n_neg: int


def _check_two_classes(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    labels = np.asarray(labels).astype(int)
    if not np.isin(labels, (0, 1)).all():
        raise ValueError("labels must be 0/1")
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("both classes required")
    return labels, np.asarray([n_pos, n_neg])


def roc_auc(scores, labels) -> RocCurve:
    scores = np.asarray(scores, dtype=float)
    labels, (n_pos, n_neg) = _check_two_classes(labels)
    if scores.shape != labels.shape:
        raise ShapeMismatch("scores/labels length mismatch")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    distinct = np.nonzero(np.diff(s))[0]
    cut = np.concatenate([distinct, [len(s) - 1]])
    tp_cum = np.cumsum(y)[cut]
    fp_cum = np.cumsum(1 - y)[cut]
    tpr = np.concatenate([[0.0], tp_cum / n_pos, [1.0]])
    fpr = np.concatenate([[0.0], fp_cum / n_neg, [1.0]])
    # drop the duplicated terminal point introduced when scores are all distinct
    if tpr[-2] == 1.0 and fpr[-2] == 1.0:
        tpr, fpr = tpr[:-1], fpr[:-1]
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(
        thresholds=s[cut],
        fpr=fpr,
        tpr=tpr,
        auc=auc,
        n_pos=n_pos,
        n_neg=n_neg,
    )


def _placements(scores: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Structural components: V10 per positive case, V01 per negative case."""
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    n_pos, n_neg = len(pos), len(neg)
    all_ranks = rankdata(np.concatenate([pos, neg]))
    pos_ranks = rankdata(pos)
    neg_ranks = rankdata(neg)
    v10 = (all_ranks[:n_pos] - pos_ranks) / n_neg
    v01 = 1.0 - (all_ranks[n_pos:] - neg_ranks) / n_pos
    return v10, v01


@dataclass(frozen=True)
class DelongResult:
    auc_a: float
    var_a: float
    ci_a: tuple[float, float]
    auc_b: float | None = None
    var_b: float | None = None
    ci_b: tuple[float, float] | None = None
    cov_ab: float | None = None
    z: float | None = None
    p: float | None = None
    degenerate: bool = False


def delong_variance(scores, labels) -> DelongResult:
    """AUC with its structural-components variance and 95% CI."""
    scores = np.asarray(scores, dtype=float)
    labels, (n_pos, n_neg) = _check_two_classes(labels)
    if n_pos < 2 or n_neg < 2:
        raise SingleClass("need at least two cases per class for a variance")
    v10, v01 = _placements(scores, labels)
    auc = float(v10.mean())
    var = float(np.var(v10, ddof=1) / n_pos + np.var(v01, ddof=1) / n_neg)
    half = 1.96 * math.sqrt(max(var, 0.0))
    ci = (max(auc - half, 0.0), min(auc + half, 1.0))
    return DelongResult(auc_a=auc, var_a=var, ci_a=ci)


def delong_paired(scores_a, scores_b, labels) -> DelongResult:
    """Two-sided test for equality of correlated AUCs on the same cases."""
    scores_a = np.asarray(scores_a, dtype=float)
    scores_b = np.asarray(scores_b, dtype=float)
    if scores_a.shape != scores_b.shape:
        raise ShapeMismatch("paired score vectors differ in length")
    labels, (n_pos, n_neg) = _check_two_classes(labels)
    if scores_a.shape != labels.shape:
        raise ShapeMismatch("scores/labels length mismatch")
    if n_pos < 2 or n_neg < 2:
        raise SingleClass("need at least two cases per class for a variance")

    va10, va01 = _placements(scores_a, labels)
    vb10, vb01 = _placements(scores_b, labels)
    auc_a = float(va10.mean())
    auc_b = float(vb10.mean())
    var_a = float(np.var(va10, ddof=1) / n_pos + np.var(va01, ddof=1) / n_neg)
    var_b = float(np.var(vb10, ddof=1) / n_pos + np.var(vb01, ddof=1) / n_neg)
    cov = float(
        np.cov(va10, vb10, ddof=1)[0, 1] / n_pos
        + np.cov(va01, vb01, ddof=1)[0, 1] / n_neg
    )
    denom_sq = var_a + var_b - 2.0 * cov
    half_a = 1.96 * math.sqrt(max(var_a, 0.0))
    half_b = 1.96 * math.sqrt(max(var_b, 0.0))
    base = dict(
        auc_a=auc_a, var_a=var_a,
        ci_a=(max(auc_a - half_a, 0.0), min(auc_a + half_a, 1.0)),
        auc_b=auc_b, var_b=var_b,
        ci_b=(max(auc_b - half_b, 0.0), min(auc_b + half_b, 1.0)),
        cov_ab=cov,
    )
    if denom_sq < 1e-15:
        return DelongResult(**base, z=0.0, p=1.0, degenerate=True)
    z = (auc_a - auc_b) / math.sqrt(denom_sq)
    p = float(2.0 * norm.sf(abs(z)))
    return DelongResult(**base, z=float(z), p=p)


def consensus_reference(votes: tuple[str, str, str]) -> str:
    """Majority of three biopsy recommendations: candid iff >= 2 votes."""
    if len(votes) != 3:
        raise ValueError("exactly three votes required")
    for v in votes:
        if v not in ("candid", "not_candid"):
            raise ValueError(f"unknown vote {v!r}")
    n_candid = sum(v == "candid" for v in votes)
    return "candid" if n_candid >= 2 else "not_candid"


def youden_threshold(scores, labels) -> float:
    """Cut maximizing sensitivity + specificity - 1 on the given data.

    Prediction rule is score >= threshold. Ties go to the higher-
    specificity cut; the returned value is the midpoint of the score gap
    below the chosen cut so it generalizes past the exact sample values.
    """
    scores = np.asarray(scores, dtype=float)
    labels, (n_pos, n_neg) = _check_two_classes(labels)
    distinct = np.unique(scores)
    best_j = -np.inf
    best_cut = distinct[-1]
    best_idx = len(distinct) - 1
    for idx, cut in enumerate(distinct):
        pred = scores >= cut
        sen = np.sum(pred & (labels == 1)) / n_pos
        spec = np.sum(~pred & (labels == 0)) / n_neg
        j = sen + spec - 1.0
        if j > best_j or (j == best_j and cut > best_cut):
            best_j, best_cut, best_idx = j, cut, idx
    if best_idx == 0:
        return float(best_cut)
    return float((distinct[best_idx - 1] + best_cut) / 2.0)
