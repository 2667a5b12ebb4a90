"""Affect and prosody sentence partitions, and per-group aggregation."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import MissingFeatures, RSAError, RSAWarning, ZeroVarianceAcrossSentences
from .rng import CounterRNG

DEFAULT_TAU_V = 0.45
DEFAULT_WEIGHTS = (0.55, -0.25, -0.20)
DEFAULT_K = 4
MAX_ITER = 300
PROSODY_COLUMNS = (
    "duration", "energy_mean", "energy_std", "energy_range", "f0_mean", "f0_std", "f0_range",
    "f0_slope", "voiced_ratio", "energy_diff_mean", "zcr_mean", "spectral_centroid_mean",
    "spectral_bandwidth_mean",
)
AFFECT_COLUMNS = ("pitch", "alpha", "hammarberg")
AFFECT_GROUPS = ("positive", "neutral", "negative")


@dataclass(frozen=True)
class AffectLabel:
    label: str
    valence: float


def valence(z, weights=DEFAULT_WEIGHTS) -> float:
    """Weighted sum of z-scored (pitch, alpha, Hammarberg) descriptors."""
    z = np.asarray(z, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if z.shape != (3,) or w.shape != (3,):
        raise RSAError("valence needs exactly three features and three weights")
    return float(z @ w)


def affect_label(v: float, tau_v: float = DEFAULT_TAU_V) -> str:
    """Strict thresholds: exactly +/- tau_v is neutral."""
    if v > tau_v:
        return "positive"
    if v < -tau_v:
        return "negative"
    return "neutral"


def zscore_across(rows: np.ndarray, allow_flat: bool = False) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.float64)
    mu = rows.mean(axis=0)
    sd = rows.std(axis=0)
    flat = sd <= 1e-12 * np.maximum(np.abs(mu), 1.0)
    if flat.any() and not allow_flat:
        raise ZeroVarianceAcrossSentences(
            f"feature column(s) {np.flatnonzero(flat).tolist()} constant across {rows.shape[0]} sentence(s)")
    out = np.zeros_like(rows)
    out[:, ~flat] = (rows[:, ~flat] - mu[~flat]) / sd[~flat]
    if flat.any():
        warnings.warn(f"descriptor column(s) {np.flatnonzero(flat).tolist()} constant; z set to 0", RSAWarning)
    return out


def affect_partition(
    features: Mapping[str, Sequence[float] | None],
    tau_v: float = DEFAULT_TAU_V,
    weights=DEFAULT_WEIGHTS,
) -> dict[str, AffectLabel]:
    """Label each sentence positive / neutral / negative.

    ``features`` maps sentence id to raw (pitch, alpha, Hammarberg); they are
    z-scored across the given sentences before weighting.
    """
    missing = [sid for sid, f in features.items() if f is None]
    if missing:
        raise MissingFeatures(missing, "affect features")
    ids = list(features)
    z = zscore_across(np.array([features[s] for s in ids], dtype=np.float64).reshape(len(ids), 3))
    out = {}
    for sid, row in zip(ids, z):
        v = valence(row, weights)
        out[sid] = AffectLabel(affect_label(v, tau_v), v)
    return out


@dataclass
class ProsodyCluster:
    cluster_id: int
    centroid: np.ndarray
    members: list[str] = field(default_factory=list)


@dataclass
class KMeansResult:
    labels: np.ndarray
    centroids: np.ndarray
    wcss_history: list[float]
    n_iter: int
    converged: bool

    @property
    def wcss(self) -> float:
        return self.wcss_history[-1]


def _sq_dists(points, centroids):
    return ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)


def kmeans_pp_init(points: np.ndarray, k: int, rng: CounterRNG) -> np.ndarray:
    n = points.shape[0]
    chosen = [rng.integer(n)]
    d2 = ((points - points[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        if d2.sum() > 0:
            idx = rng.choice_weighted(d2)
        else:
            idx = rng.integer(n)
        chosen.append(idx)
        d2 = np.minimum(d2, ((points - points[idx]) ** 2).sum(axis=1))
    return points[chosen].copy()


def kmeans(points, k: int = DEFAULT_K, seed: int = 0, max_iter: int = MAX_ITER) -> KMeansResult:
    """Lloyd iterations from a k-means++ start.

    Stops at an assignment fixed point or after ``max_iter`` iterations. An
    empty cluster is reseeded at the point farthest from its current
    centroid, with a warning. Assignment ties go to the lowest cluster index.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if k < 1 or n < k:
        raise RSAError(f"k-means needs 1 <= k <= rows (k={k}, rows={n})")
    rng = CounterRNG(seed).child(0)
    centroids = kmeans_pp_init(points, k, rng)
    labels = np.full(n, -1)
    history: list[float] = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        d = _sq_dists(points, centroids)
        new = np.argmin(d, axis=1)
        history.append(float(d[np.arange(n), new].sum()))
        if np.array_equal(new, labels):
            converged = True
            break
        labels = new
        for j in range(k):
            members = labels == j
            if members.any():
                centroids[j] = points[members].mean(axis=0)
            else:
                far = int(np.argmax(d[np.arange(n), labels]))
                warnings.warn(f"EmptyCluster: cluster {j} reseeded at point {far}", RSAWarning)
                centroids[j] = points[far]
    return KMeansResult(labels=labels, centroids=centroids, wcss_history=history, n_iter=it, converged=converged)


def prosody_partition(
    rows: Mapping[str, Sequence[float] | None], k: int = DEFAULT_K, seed: int = 0
) -> tuple[list[ProsodyCluster], KMeansResult]:
    missing = [sid for sid, r in rows.items() if r is None]
    if missing:
        raise MissingFeatures(missing, "prosody descriptors")
    ids = list(rows)
    z = zscore_across(np.array([rows[s] for s in ids], dtype=np.float64), allow_flat=True)
    res = kmeans(z, k, seed)
    clusters = [ProsodyCluster(j, res.centroids[j].copy()) for j in range(k)]
    for sid, lab in zip(ids, res.labels):
        clusters[int(lab)].members.append(sid)
    return clusters, res


@dataclass(frozen=True)
class GroupRow:
    group: str
    metric: str
    mean: float
    sd: float
    n: int
    n_excluded: int


def group_summary(
    groups: Mapping[str, str],
    scores: Mapping[str, Mapping[str, float | None]],
    metrics: Iterable[str] | None = None,
    group_names: Iterable[str] | None = None,
) -> list[GroupRow]:
    """Mean, population sd and count per (group, metric).

    ``groups`` maps sentence -> group; ``scores`` maps sentence -> metric ->
    value. Missing or NaN values are excluded and counted in ``n_excluded``.
    Groups without usable values get a row with ``n = 0`` and NaN statistics.
    """
    names = list(group_names) if group_names is not None else sorted(set(groups.values()))
    if metrics is None:
        metrics = sorted({m for per in scores.values() for m in per})
    metrics = list(metrics)
    rows = []
    for g in names:
        members = [s for s, grp in groups.items() if grp == g]
        for m in metrics:
            vals, excluded = [], 0
            for s in members:
                v = scores.get(s, {}).get(m)
                if v is None or not math.isfinite(v):
                    excluded += 1
                else:
                    vals.append(v)
            if vals:
                arr = np.asarray(vals)
                rows.append(GroupRow(g, m, float(arr.mean()), float(arr.std()), len(vals), excluded))
            else:
                rows.append(GroupRow(g, m, math.nan, math.nan, 0, excluded))
    return rows
