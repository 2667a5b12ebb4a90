"""The eight cross-modal similarity measures.

The RSA family (Pearson RSA, Spearman RSA, Kendall tau-b) compares RDM
upper-triangle vectors. dCor, RV, the Gaussian MI proxy and CKA consume the
two time-aligned matrices directly, with rows as time steps.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import AllTies, DegenerateGram, RSAError, RSAWarning, ShapeMismatch, ZeroVariance
from .rdm import build_rdm, from_upper, rank_transform, vec_upper

MI_CLAMP = 1e-12


class Metric(str, enum.Enum):
    PEARSON_RSA = "PearsonRSA"
    SPEARMAN_RSA = "SpearmanRSA"
    KENDALL_TAU_B = "KendallTauB"
    DCOR = "DCor"
    RV = "RV"
    MI_GAUSS = "MIGauss"
    CKA_LINEAR = "CKALinear"
    CKA_RBF = "CKARBF"

    @classmethod
    def parse(cls, name: str) -> "Metric":
        key = name.strip().replace("-", "").replace("_", "").lower()
        for m in cls:
            if m.value.lower() == key:
                return m
        aliases = {"pearson": cls.PEARSON_RSA, "spearman": cls.SPEARMAN_RSA, "kendall": cls.KENDALL_TAU_B,
                   "mi": cls.MI_GAUSS, "ckal": cls.CKA_LINEAR, "ckarbf": cls.CKA_RBF, "cka": cls.CKA_LINEAR}
        if key in aliases:
            return aliases[key]
        raise ValueError(f"unknown metric {name!r}; choose from {', '.join(m.value for m in cls)}")

    @property
    def uses_rdm(self) -> bool:
        return self in (Metric.PEARSON_RSA, Metric.SPEARMAN_RSA, Metric.KENDALL_TAU_B)


ALL_METRICS = tuple(Metric)

BOUNDS = {
    Metric.PEARSON_RSA: (-1.0, 1.0),
    Metric.SPEARMAN_RSA: (-1.0, 1.0),
    Metric.KENDALL_TAU_B: (-1.0, 1.0),
    Metric.DCOR: (0.0, 1.0),
    Metric.RV: (0.0, 1.0),
    Metric.MI_GAUSS: (0.0, math.inf),
    Metric.CKA_LINEAR: (0.0, 1.0),
    Metric.CKA_RBF: (0.0, 1.0),
}


@dataclass(frozen=True)
class Score:
    metric: Metric
    value: float


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    na = math.sqrt(float(a @ a))
    nb = math.sqrt(float(b @ b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVariance("correlation undefined: a vector has zero variance")
    return max(-1.0, min(1.0, float(a @ b) / (na * nb)))


def _pair(a, b, min_len=2):
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size != b.size:
        raise ShapeMismatch(f"vectors differ in length ({a.size} vs {b.size})")
    if a.size < min_len:
        raise RSAError(f"need at least {min_len} entries, got {a.size}")
    return a, b


def pearson_rsa(a, b) -> Score:
    a, b = _pair(a, b)
    return Score(Metric.PEARSON_RSA, _pearson(a, b))


def spearman_rsa(a, b) -> Score:
    a, b = _pair(a, b)
    return Score(Metric.SPEARMAN_RSA, _pearson(rank_transform(a), rank_transform(b)))


# --- Kendall tau-b ------------------------------------------------------------


def count_inversions(seq) -> int:
    """Pairs i < j with seq[i] > seq[j], by bottom-up merge sort.

    Each level merges adjacent sorted runs of width ``w``; for every element
    of a right run the number of strictly larger elements in its left partner
    is read off with a binary search.
    """
    _, vals = np.unique(np.asarray(seq), return_inverse=True)
    vals = vals.astype(np.int64).ravel()
    n = vals.size
    total = 0
    pos = np.arange(n, dtype=np.int64)
    width = 1
    while width < n:
        block = pos // (2 * width)
        right = (pos % (2 * width)) >= width
        left_keys = block[~right] * n + vals[~right]
        rb = block[right]
        right_keys = rb * n + vals[right]
        start = np.searchsorted(left_keys, rb * n, side="left")
        stop = np.searchsorted(left_keys, (rb + 1) * n, side="left")
        not_greater = np.searchsorted(left_keys, right_keys, side="right") - start
        total += int(np.sum(stop - start - not_greater))
        vals = np.sort(block * n + vals) - block * n
        width *= 2
    return total


def _tie_pairs(sorted_vals: np.ndarray) -> int:
    if sorted_vals.size == 0:
        return 0
    change = np.flatnonzero(np.diff(sorted_vals) != 0)
    counts = np.diff(np.concatenate(([0], change + 1, [sorted_vals.size])))
    return int(np.sum(counts * (counts - 1) // 2))


def tau_b_from_counts(concordant: int, discordant: int, ties_a_only: int, ties_b_only: int) -> float:
    """(C - D) / sqrt((C + D + T_a)(C + D + T_b)) from integer pair counts."""
    p = concordant + discordant + ties_a_only
    q = concordant + discordant + ties_b_only
    prod = p * q
    if prod == 0:
        raise AllTies("tau-b undefined: one vector is constant")
    root = math.isqrt(prod)
    denom = float(root) if root * root == prod else math.sqrt(prod)
    return max(-1.0, min(1.0, (concordant - discordant) / denom))


def kendall_counts(a, b) -> tuple[int, int, int, int]:
    """(C, D, T_a-only, T_b-only) in O(n log n)."""
    a, b = _pair(a, b)
    n = a.size
    order = np.lexsort((b, a))
    a_s, b_s = a[order], b[order]
    n0 = n * (n - 1) // 2
    n1 = _tie_pairs(a_s)
    joint_change = np.flatnonzero((np.diff(a_s) != 0) | (np.diff(b_s) != 0))
    jc = np.diff(np.concatenate(([0], joint_change + 1, [n])))
    n3 = int(np.sum(jc * (jc - 1) // 2))
    n2 = _tie_pairs(np.sort(b))
    d = count_inversions(b_s)
    c = n0 - n1 - n2 + n3 - d
    return c, d, n1 - n3, n2 - n3


def kendall_tau_b(a, b) -> Score:
    return Score(Metric.KENDALL_TAU_B, tau_b_from_counts(*kendall_counts(a, b)))


# --- matrix metrics -------------------------------------------------------------


def _rows_pair(x, y, min_rows):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if y.ndim == 1:
        y = y[:, None]
    if x.shape[0] != y.shape[0]:
        raise ShapeMismatch(f"matrices are not row-aligned ({x.shape[0]} vs {y.shape[0]} rows)")
    if x.shape[0] < min_rows:
        raise RSAError(f"need at least {min_rows} rows, got {x.shape[0]}")
    return x, y


def double_center(d: np.ndarray) -> np.ndarray:
    return d - d.mean(axis=0, keepdims=True) - d.mean(axis=1, keepdims=True) + d.mean()


def _dcor_from_centered(a: np.ndarray, b: np.ndarray, var_a: float, var_b: float) -> float:
    if var_a <= 0.0 or var_b <= 0.0:
        warnings.warn("dCor degenerate: zero distance variance, returning 0", RSAWarning)
        return 0.0
    dcov2 = max(float(np.mean(a * b)), 0.0)
    return min(1.0, math.sqrt(dcov2 / math.sqrt(var_a * var_b)))


def dcor(x, y) -> Score:
    """Distance correlation (V-statistic form) over rows."""
    x, y = _rows_pair(x, y, 3)
    a = double_center(cdist(x, x))
    b = double_center(cdist(y, y))
    return Score(Metric.DCOR, _dcor_from_centered(a, b, float(np.mean(a * a)), float(np.mean(b * b))))


def _rv_from_centered(xc: np.ndarray, yc: np.ndarray, den: float) -> float:
    cross = xc.T @ yc
    return min(1.0, float(np.sum(cross * cross)) / den)


def _rv_den(xc, yc):
    if not np.any(xc) or not np.any(yc):
        raise ZeroVariance("RV undefined: a column-centered matrix is all zeros")
    sxx = xc.T @ xc
    syy = yc.T @ yc
    return math.sqrt(float(np.sum(sxx * sxx)) * float(np.sum(syy * syy)))


def rv_coefficient(x, y) -> Score:
    x, y = _rows_pair(x, y, 2)
    xc = x - x.mean(axis=0)
    yc = y - y.mean(axis=0)
    return Score(Metric.RV, _rv_from_centered(xc, yc, _rv_den(xc, yc)))


def _mi_from_r(r: float) -> float:
    # 1 - r^2 factored to keep precision near |r| = 1, then clamped
    return -0.5 * math.log(max((1.0 - r) * (1.0 + r), MI_CLAMP))


def mi_gauss(x, y) -> Score:
    """-1/2 ln(1 - r^2) with r the Pearson correlation of the flattened matrices."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ShapeMismatch(f"MI proxy needs identical shapes, got {x.shape} and {y.shape}")
    return Score(Metric.MI_GAUSS, _mi_from_r(_pearson(x.ravel(), y.ravel())))


def median_bandwidth(x: np.ndarray) -> float:
    """Median pairwise Euclidean distance; mean of the nonzero ones if the median is 0."""
    d = pdist(x)
    sigma = float(np.median(d)) if d.size else 0.0
    if sigma <= 0.0:
        nz = d[d > 0]
        sigma = float(nz.mean()) if nz.size else 0.0
    return sigma


def gram(x: np.ndarray, kernel: str, sigma: float | None = None) -> np.ndarray:
    if kernel == "linear":
        return x @ x.T
    if kernel == "rbf":
        if sigma is None:
            sigma = median_bandwidth(x)
        if sigma <= 0.0:
            raise DegenerateGram("RBF bandwidth is zero: all rows identical")
        d2 = cdist(x, x, "sqeuclidean")
        return np.exp(-d2 / (2.0 * sigma * sigma))
    raise ValueError(f"unknown kernel {kernel!r}")


def _centered_gram(x, kernel, sigma):
    k = gram(x, kernel, sigma)
    kc = double_center(k)
    kc = 0.5 * (kc + kc.T)
    norm = math.sqrt(float(np.sum(kc * kc)))
    if norm <= 1e-12 * max(math.sqrt(float(np.sum(k * k))), 1e-300):
        raise DegenerateGram("centered Gram matrix is zero (constant rows)")
    return kc, norm


def cka(x, y, kernel: str = "linear", sigma_x: float | None = None, sigma_y: float | None = None) -> Score:
    x, y = _rows_pair(x, y, 3)
    kc, nk = _centered_gram(x, kernel, sigma_x)
    lc, nl = _centered_gram(y, kernel, sigma_y)
    metric = Metric.CKA_LINEAR if kernel == "linear" else Metric.CKA_RBF
    return Score(metric, max(0.0, min(1.0, float(np.sum(kc * lc)) / (nk * nl))))


# --- dispatch -------------------------------------------------------------------


def compute(metric: Metric, x, y, rdm_x=None, rdm_y=None) -> Score:
    """Evaluate ``metric`` on two row-aligned matrices.

    RDMs may be passed in to avoid rebuilding them for each RSA metric.
    """
    metric = Metric(metric)
    if metric.uses_rdm:
        vx = vec_upper(build_rdm(x) if rdm_x is None else rdm_x)
        vy = vec_upper(build_rdm(y) if rdm_y is None else rdm_y)
        fn = {Metric.PEARSON_RSA: pearson_rsa, Metric.SPEARMAN_RSA: spearman_rsa,
              Metric.KENDALL_TAU_B: kendall_tau_b}[metric]
        return fn(vx, vy)
    if metric is Metric.DCOR:
        return dcor(x, y)
    if metric is Metric.RV:
        return rv_coefficient(x, y)
    if metric is Metric.MI_GAUSS:
        return mi_gauss(x, y)
    if metric is Metric.CKA_LINEAR:
        return cka(x, y, "linear")
    return cka(x, y, "rbf")


def permutation_scorer(metric: Metric, x, y) -> Callable[[np.ndarray | None], float]:
    """Return ``f(perm)`` = score of ``x`` against ``y[perm]``.

    Everything that does not depend on the permutation is computed once.
    Permuting the rows of ``y`` permutes its RDM, distance and Gram matrices
    symmetrically, so those are re-indexed rather than rebuilt. ``f(None)``
    scores the unpermuted pair.
    """
    metric = Metric(metric)
    x, y = _rows_pair(x, y, 2)
    n = x.shape[0]

    if metric.uses_rdm:
        iu0, iu1 = np.triu_indices(n, k=1)
        vx = vec_upper(build_rdm(x))
        ry = build_rdm(y)
        if metric is Metric.PEARSON_RSA:
            _pearson(vx, vec_upper(ry))  # surface ZeroVariance before any draws
            return lambda p: _pearson(vx, ry[iu0, iu1] if p is None else ry[p[iu0], p[iu1]])
        if metric is Metric.SPEARMAN_RSA:
            rx = rank_transform(vx)
            qy = from_upper(rank_transform(vec_upper(ry)), n)
            _pearson(rx, qy[iu0, iu1])
            return lambda p: _pearson(rx, qy[iu0, iu1] if p is None else qy[p[iu0], p[iu1]])
        return lambda p: tau_b_from_counts(*kendall_counts(vx, ry[iu0, iu1] if p is None else ry[p[iu0], p[iu1]]))

    if metric is Metric.DCOR:
        a = double_center(cdist(x, x))
        b = double_center(cdist(y, y))
        va, vb = float(np.mean(a * a)), float(np.mean(b * b))
        return lambda p: _dcor_from_centered(a, b if p is None else b[np.ix_(p, p)], va, vb)
    if metric is Metric.RV:
        xc = x - x.mean(axis=0)
        yc = y - y.mean(axis=0)
        den = _rv_den(xc, yc)
        return lambda p: _rv_from_centered(xc, yc if p is None else yc[p], den)
    if metric is Metric.MI_GAUSS:
        if x.shape != y.shape:
            raise ShapeMismatch(f"MI proxy needs identical shapes, got {x.shape} and {y.shape}")
        xf = x.ravel()
        _pearson(xf, y.ravel())
        return lambda p: _mi_from_r(_pearson(xf, (y if p is None else y[p]).ravel()))
    kernel = "linear" if metric is Metric.CKA_LINEAR else "rbf"
    kc, nk = _centered_gram(x, kernel, None)
    lc, nl = _centered_gram(y, kernel, None)
    return lambda p: max(0.0, min(1.0, float(np.sum(kc * (lc if p is None else lc[np.ix_(p, p)]))) / (nk * nl)))
