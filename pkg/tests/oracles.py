"""Independent brute-force references used by the test suite.

Everything here is deliberately naive (dense rasters, O(n^2)/O(n^3)
loops, resampling) and shares no code path with the library.
"""

import numpy as np
from matplotlib.path import Path


def brute_force_hull_vertices(points: np.ndarray) -> set[tuple[float, float]]:
    """O(n^3) hull-vertex set: p is interior if some triangle contains it."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)

    def in_triangle(p, a, b, c):
        def cross(o, u, v):
            return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])

        d1, d2, d3 = cross(a, b, p), cross(b, c, p), cross(c, a, p)
        has_neg = (d1 < 0) or (d2 < 0) or (d3 < 0)
        has_pos = (d1 > 0) or (d2 > 0) or (d3 > 0)
        return not (has_neg and has_pos)

    hull = set()
    for i in range(n):
        interior = False
        for j in range(n):
            if interior:
                break
            for k in range(j + 1, n):
                if interior:
                    break
                for l in range(k + 1, n):
                    if i in (j, k, l):
                        continue
                    if in_triangle(pts[i], pts[j], pts[k], pts[l]):
                        interior = True
                        break
        if not interior:
            hull.add((round(pts[i][0], 12), round(pts[i][1], 12)))
    return hull


def raster_moments(vertices: np.ndarray, cell: float) -> dict[str, float]:
    """Dense-raster region moments m_pq (p+q <= 3) at the given cell size."""
    v = np.asarray(vertices, dtype=float)
    path = Path(v, closed=False)
    xmin, ymin = v.min(axis=0) - cell
    xmax, ymax = v.max(axis=0) + cell
    xs = np.arange(xmin + cell / 2.0, xmax, cell)
    ys = np.arange(ymin + cell / 2.0, ymax, cell)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    inside = path.contains_points(pts)
    x = pts[inside, 0]
    y = pts[inside, 1]
    w = cell * cell
    out = {}
    for p in range(4):
        for q in range(4 - p):
            out[f"m{p}{q}"] = float(np.sum(x**p * y**q) * w)
    return out


def pairwise_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """O(n^2) Mann-Whitney AUC with ties counted one half."""
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    total = 0.0
    for sp in pos:
        for sn in neg:
            if sp > sn:
                total += 1.0
            elif sp == sn:
                total += 0.5
    return total / (len(pos) * len(neg))


def delong_components_loops(scores: np.ndarray, labels: np.ndarray):
    """Structural components V10/V01 by direct double loops."""
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    v10 = np.empty(len(pos))
    for i, sp in enumerate(pos):
        acc = 0.0
        for sn in neg:
            acc += 1.0 if sp > sn else (0.5 if sp == sn else 0.0)
        v10[i] = acc / len(neg)
    v01 = np.empty(len(neg))
    for j, sn in enumerate(neg):
        acc = 0.0
        for sp in pos:
            acc += 1.0 if sp > sn else (0.5 if sp == sn else 0.0)
        v01[j] = acc / len(pos)
    return v10, v01


def delong_variance_loops(scores: np.ndarray, labels: np.ndarray) -> float:
    v10, v01 = delong_components_loops(scores, labels)
    n_pos, n_neg = len(v10), len(v01)
    s10 = np.var(v10, ddof=1) if n_pos > 1 else 0.0
    s01 = np.var(v01, ddof=1) if n_neg > 1 else 0.0
    return float(s10 / n_pos + s01 / n_neg)


def rank_auc_rows(scores: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Row-wise tied-rank AUC for (reps, n) matrices of scores/labels."""
    from scipy.stats import rankdata

    ranks = rankdata(scores, axis=1)
    n_pos = labels.sum(axis=1)
    n_neg = labels.shape[1] - n_pos
    rank_pos = np.sum(ranks * labels, axis=1)
    return (rank_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def bootstrap_auc_difference_p(
    scores_a: np.ndarray,
    scores_b: np.ndarray,
    labels: np.ndarray,
    n_reps: int = 10_000,
    seed: int = 0,
) -> float:
    """Case-resampling bootstrap p for the AUC difference.

    Normal reference on observed-difference / bootstrap-SE, the usual
    bootstrap analogue of the paired-curves test.
    """
    from scipy.stats import norm

    rng = np.random.default_rng(seed)
    n = len(labels)
    obs = pairwise_auc_fast(scores_a, labels) - pairwise_auc_fast(scores_b, labels)
    diffs = np.empty(n_reps)
    done = 0
    while done < n_reps:
        take = min(2000, n_reps - done)
        idx = rng.integers(0, n, size=(take, n))
        lab = labels[idx]
        ok = (lab.sum(axis=1) > 0) & (lab.sum(axis=1) < n)
        idx = idx[ok]
        if len(idx) == 0:
            continue
        lab = labels[idx]
        auc_a = rank_auc_rows(scores_a[idx], lab)
        auc_b = rank_auc_rows(scores_b[idx], lab)
        got = min(len(idx), n_reps - done)
        diffs[done:done + got] = (auc_a - auc_b)[:got]
        done += got
    se = float(np.std(diffs, ddof=1))
    if se == 0:
        return 1.0
    z = obs / se
    return float(2.0 * norm.sf(abs(z)))


def pairwise_auc_fast(scores: np.ndarray, labels: np.ndarray) -> float:
    from scipy.stats import rankdata

    ranks = rankdata(scores)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    return float((ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def icc_two_way_anova(a: np.ndarray, b: np.ndarray) -> float:
    """ICC(2,1) from first-principles two-way ANOVA mean squares."""
    y = np.column_stack([a, b]).astype(float)
    n, k = y.shape
    grand = y.mean()
    row_means = y.mean(axis=1)
    col_means = y.mean(axis=0)
    ss_rows = k * np.sum((row_means - grand) ** 2)
    ss_cols = n * np.sum((col_means - grand) ** 2)
    ss_total = np.sum((y - grand) ** 2)
    ss_err = ss_total - ss_rows - ss_cols
    msr = ss_rows / (n - 1)
    msc = ss_cols / (k - 1)
    mse = ss_err / ((n - 1) * (k - 1))
    return (msr - mse) / (msr + (k - 1) * mse + k * (msc - mse) / n)


def logistic_mle_optimizer(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Unpenalized logistic MLE via a generic second-order optimizer."""
    from scipy.optimize import minimize

    Xd = np.column_stack([np.ones(len(y)), X])

    def negloglik(beta):
        eta = Xd @ beta
        return float(np.sum(np.logaddexp(0.0, eta)) - y @ eta)

    def grad(beta):
        p = 1.0 / (1.0 + np.exp(-(Xd @ beta)))
        return Xd.T @ (p - y)

    res = minimize(negloglik, np.zeros(Xd.shape[1]), jac=grad, method="BFGS",
                   options={"gtol": 1e-10, "maxiter": 500})
    return res.x
