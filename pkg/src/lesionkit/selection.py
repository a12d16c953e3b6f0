"""Feature-selection pipeline stages: reproducibility, collinearity, AUC.

The reproducibility filter computes per-feature two-way random-effects,
absolute-agreement, single-measurement intraclass correlation across two
independent raters; features are kept only above the configured
threshold. Collinearity pruning then iteratively removes the weaker
member (lower univariable AUC) of the most correlated remaining pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch
from .metrics import roc_auc


@dataclass
class FeatureMatrix:
    """Lesions by named features, with optional labels and cohort tags."""

    names: list[str]
    values: np.ndarray
    labels: np.ndarray | None = None
    cohorts: list[str] | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.names):
            raise ShapeMismatch("value matrix does not match feature names")
        if len(set(self.names)) != len(self.names):
            raise ValueError("feature names must be unique")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature matrix contains non-finite values")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if len(self.labels) != len(self.values):
                raise ShapeMismatch("labels do not match rows")

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]

    def subset(self, names: list[str]) -> "FeatureMatrix":
        idx = [self.names.index(n) for n in names]
        return FeatureMatrix(
            names=list(names),
            values=self.values[:, idx],
            labels=self.labels,
            cohorts=self.cohorts,
        )


@dataclass(frozen=True)
class IccEntry:
    feature: str
    icc: float | None          # None when undefined (zero variance)
    msr: float
    msc: float
    mse: float
    kept: bool


@dataclass(frozen=True)
class IccReport:
    threshold: float
    entries: tuple[IccEntry, ...]

    @property
    def kept_features(self) -> list[str]:
        return [e.feature for e in self.entries if e.kept]


def icc_two_way_single(ratings: np.ndarray) -> tuple[float, float, float, float]:
    """ICC(2,1) with its mean squares for an (n_subjects, n_raters) table."""
    y = np.asarray(ratings, dtype=float)
    n, k = y.shape
    grand = y.mean()
    row_means = y.mean(axis=1)
    col_means = y.mean(axis=0)
    ss_rows = k * float(np.sum((row_means - grand) ** 2))
    ss_cols = n * float(np.sum((col_means - grand) ** 2))
    ss_total = float(np.sum((y - grand) ** 2))
    ss_err = ss_total - ss_rows - ss_cols
    msr = ss_rows / (n - 1)
    msc = ss_cols / (k - 1)
    mse = ss_err / ((n - 1) * (k - 1))
    denom = msr + (k - 1) * mse + k * (msc - mse) / n
    icc = (msr - mse) / denom
    return icc, msr, msc, mse


def icc_filter(rater_a: FeatureMatrix, rater_b: FeatureMatrix, threshold: float = 0.85) -> IccReport:
    """Per-feature inter-rater agreement; kept iff ICC > threshold.

    Constant features (no variance for either rater) have no defined ICC
    and are reported as not kept.
    """
    if rater_a.names != rater_b.names:
        raise ShapeMismatch("rater feature columns differ")
    if rater_a.values.shape != rater_b.values.shape:
        raise ShapeMismatch("rater matrices differ in shape")
    if len(rater_a.values) < 2:
        raise ShapeMismatch("need at least two lesions for an ICC")

    entries = []
    for j, name in enumerate(rater_a.names):
        table = np.column_stack([rater_a.values[:, j], rater_b.values[:, j]])
        if np.ptp(table) == 0.0:
            entries.append(IccEntry(feature=name, icc=None, msr=0.0, msc=0.0, mse=0.0, kept=False))
            continue
        icc, msr, msc, mse = icc_two_way_single(table)
        entries.append(IccEntry(
            feature=name, icc=float(icc), msr=msr, msc=msc, mse=mse,
            kept=bool(icc > threshold),
        ))
    return IccReport(threshold=threshold, entries=tuple(entries))


def univariable_auc(feature: np.ndarray, labels: np.ndarray) -> float:
    """Discrimination of a raw feature, orientation-corrected to >= 0.5."""
    feature = np.asarray(feature, dtype=float)
    if np.ptp(feature) == 0.0:
        # constant score: every threshold gives the same chance-level curve
        return 0.5
    auc = roc_auc(feature, labels).auc
    return max(auc, 1.0 - auc)


@dataclass(frozen=True)
class DroppedPair:
    kept: str
    dropped: str
    r: float
    kept_auc: float
    dropped_auc: float


@dataclass(frozen=True)
class PruneResult:
    kept: list[str]
    dropped_pairs: tuple[DroppedPair, ...]


def collinearity_prune(
    matrix: FeatureMatrix,
    r_threshold: float = 0.85,
    aucs: dict[str, float] | None = None,
) -> PruneResult:
    """Drop the lower-AUC member of each |r| > threshold pair.

    Pairs are resolved worst-first (highest |r|); AUC ties break
    lexicographically by feature name (the later name is dropped), so the
    outcome is deterministic.
    """
    if aucs is None:
        if matrix.labels is None:
            raise ValueError("need univariable AUCs or labels on the matrix")
        aucs = {
            name: univariable_auc(matrix.column(name), matrix.labels)
            for name in matrix.names
        }
    missing = set(matrix.names) - set(aucs)
    if missing:
        raise ValueError(f"AUC missing for features: {sorted(missing)}")

    names = list(matrix.names)
    values = matrix.values.copy()
    dropped_log: list[DroppedPair] = []

    def corr_matrix(vals):
        sd = vals.std(axis=0, ddof=0)
        safe = np.where(sd == 0, 1.0, sd)
        centered = (vals - vals.mean(axis=0)) / safe
        r = centered.T @ centered / len(vals)
        r[np.ix_(sd == 0, np.arange(len(sd)))] = 0.0
        r[np.ix_(np.arange(len(sd)), sd == 0)] = 0.0
        np.fill_diagonal(r, 1.0)
        return r

    while len(names) > 1:
        r = corr_matrix(values)
        absr = np.abs(r)
        np.fill_diagonal(absr, 0.0)
        worst = float(absr.max())
        if worst <= r_threshold:
            break
        # deterministic pick of the worst pair: highest |r|, then name order
        candidates = np.argwhere(np.isclose(absr, worst))
        candidates = [(i, j) for i, j in candidates if i < j]
        i, j = min(candidates, key=lambda ij: (names[ij[0]], names[ij[1]]))
        a, b = names[i], names[j]
        if (aucs[a], b) > (aucs[b], a):
            keep, drop, drop_idx = a, b, j
        else:
            keep, drop, drop_idx = b, a, i
        dropped_log.append(DroppedPair(
            kept=keep, dropped=drop, r=float(r[i, j]),
            kept_auc=aucs[keep], dropped_auc=aucs[drop],
        ))
        del names[drop_idx]
        values = np.delete(values, drop_idx, axis=1)

    return PruneResult(kept=names, dropped_pairs=tuple(dropped_log))
