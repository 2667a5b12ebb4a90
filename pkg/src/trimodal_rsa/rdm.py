"""Correlation-distance RDMs over time steps."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.stats import rankdata

from .errors import RSAError, RSAWarning


def constant_rows(m: np.ndarray) -> np.ndarray:
    centered = m - m.mean(axis=1, keepdims=True)
    norm = np.sqrt(np.sum(centered**2, axis=1))
    scale = np.maximum(np.max(np.abs(m), axis=1), 1e-300)
    return np.flatnonzero(norm <= 1e-12 * scale * np.sqrt(m.shape[1]))


def build_rdm(m, min_rows: int = 3) -> np.ndarray:
    """``1 - Pearson(row_i, row_j)`` for every pair of time steps.

    A row with no variance across features has undefined correlation; its
    distances to every other row are set to 1 and an ``RSAWarning`` reports
    how many rows were affected.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise RSAError(f"expected a 2-D matrix, got shape {m.shape}")
    if m.shape[0] < min_rows:
        raise RSAError(f"RDM needs at least {min_rows} time steps, got {m.shape[0]}")
    if m.shape[1] < 2:
        raise RSAError("RDM needs at least 2 feature columns for a row-wise Pearson correlation")
    centered = m - m.mean(axis=1, keepdims=True)
    norm = np.sqrt(np.sum(centered**2, axis=1))
    flat = constant_rows(m)
    safe = norm.copy()
    safe[flat] = 1.0
    unit = centered / safe[:, None]
    unit[flat] = 0.0
    corr = np.clip(unit @ unit.T, -1.0, 1.0)
    rdm = 1.0 - corr
    rdm = 0.5 * (rdm + rdm.T)
    np.fill_diagonal(rdm, 0.0)
    if flat.size:
        warnings.warn(f"ConstantRow: {flat.size} time step(s) with constant features; distances set to 1", RSAWarning)
    return rdm


def vec_upper(r) -> np.ndarray:
    """Strict upper triangle in row-major order (i ascending, then j > i)."""
    r = np.asarray(r)
    iu = np.triu_indices(r.shape[0], k=1)
    return r[iu]


def from_upper(v, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.size != n * (n - 1) // 2:
        raise RSAError(f"vector of length {v.size} does not fit an {n}x{n} RDM")
    r = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    r[iu] = v
    r[(iu[1], iu[0])] = v
    return r


def rank_transform(v) -> np.ndarray:
    """Ranks 1..m with midranks for ties."""
    v = np.asarray(v, dtype=np.float64)
    if v.size < 2:
        raise RSAError("rank transform needs at least 2 values")
    return rankdata(v, method="average")


def rdm_vec(m) -> np.ndarray:
    return vec_upper(build_rdm(m))
