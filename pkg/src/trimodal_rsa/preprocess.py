"""Per-electrode standardization, PCA reduction and token-grid resampling."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import RSAError, RSAWarning, TooShort, ZeroVarianceColumn

DEFAULT_PCA_K = 20


def _as_mat(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise RSAError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    return m


def zscore_columns(m) -> np.ndarray:
    """Center each column and scale it to unit population standard deviation.

    Raises:
        ZeroVarianceColumn: naming the first constant column.
    """
    m = _as_mat(m)
    mean = m.mean(axis=0)
    centered = m - mean
    std = np.sqrt(np.mean(centered**2, axis=0))
    scale = np.maximum(np.abs(mean), 1.0)
    flat = np.flatnonzero(std <= 1e-12 * scale)
    if flat.size:
        raise ZeroVarianceColumn(int(flat[0]))
    return centered / std


def flat_columns(m, tol: float = 1e-12) -> np.ndarray:
    """Indices of columns whose population std is negligible."""
    m = _as_mat(m)
    std = m.std(axis=0)
    scale = np.maximum(np.abs(m.mean(axis=0)), 1.0)
    return np.flatnonzero(std <= tol * scale)


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # k x cols, orthonormal rows
    explained_variance: np.ndarray  # population variance of each score column

    @property
    def k(self) -> int:
        return self.components.shape[0]

    def transform(self, m) -> np.ndarray:
        return (_as_mat(m) - self.mean) @ self.components.T

    def inverse_transform(self, scores) -> np.ndarray:
        return np.asarray(scores) @ self.components + self.mean


def pca_fit_transform(m, k: int = DEFAULT_PCA_K) -> tuple[PcaModel, np.ndarray]:
    """PCA through the SVD of the centered matrix.

    Each component is sign-fixed so its largest-magnitude entry is positive.
    Explained variances use the population (divide-by-rows) convention, so
    the mean squared reconstruction residual per row equals the sum of the
    discarded variances. Components beyond the numerical rank get zero scores
    and a warning.
    """
    m = _as_mat(m)
    rows, cols = m.shape
    if k < 1 or k > min(rows, cols):
        raise RSAError(f"k={k} must lie in [1, min(rows, cols)={min(rows, cols)}]")
    mean = m.mean(axis=0)
    centered = m - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:k].copy()
    pivot = np.argmax(np.abs(comps), axis=1)
    signs = np.sign(comps[np.arange(k), pivot])
    signs[signs == 0] = 1.0
    comps *= signs[:, None]
    var = s[:k] ** 2 / rows
    tol = max(rows, cols) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    scores = centered @ comps.T
    if k > rank:
        warnings.warn(f"RankDeficient: k={k} exceeds numerical rank {rank}; trailing components zeroed", RSAWarning)
        scores[:, rank:] = 0.0
        var[rank:] = 0.0
    return PcaModel(mean=mean, components=comps, explained_variance=var), scores


def reduce(m, k: int = DEFAULT_PCA_K) -> np.ndarray:
    """PCA scores with k clamped to what the matrix supports (rows-1, cols)."""
    m = _as_mat(m)
    k_eff = max(1, min(k, m.shape[0] - 1, m.shape[1]))
    return pca_fit_transform(m, k_eff)[1]


def resample_to(m, target_len: int) -> np.ndarray:
    """Linear interpolation of every column onto ``target_len`` equally spaced
    positions spanning the source index range ``[0, rows-1]``."""
    m = _as_mat(m)
    rows = m.shape[0]
    if rows < 2 or target_len < 2:
        raise TooShort(f"resampling needs rows >= 2 and target_len >= 2 (got {rows}, {target_len})")
    if target_len == rows:
        return m.copy()
    pos = np.arange(target_len) * ((rows - 1) / (target_len - 1))
    pos[-1] = rows - 1
    lo = np.minimum(np.floor(pos).astype(np.intp), rows - 2)
    frac = (pos - lo)[:, None]
    return m[lo] * (1.0 - frac) + m[lo + 1] * frac
