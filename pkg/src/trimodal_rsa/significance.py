"""Time-shuffle permutation tests."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .errors import RSAError, RSAWarning
from .metrics import Metric, permutation_scorer
from .rng import CounterRNG

DEFAULT_N_PERM = 500
DEFAULT_BATCH = 16384


@dataclass(frozen=True)
class PermResult:
    observed: float
    n_perm: int
    null_mean: float
    null_sd: float
    p_value: float
    seed: int
    n_exceed: int = 0
    n_failed: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def p_value(n_exceed: int, n_perm: int) -> float:
    """One-sided estimator (#{null >= observed} + 1) / (n + 1)."""
    if n_perm < 1 or not 0 <= n_exceed <= n_perm:
        raise ValueError(f"invalid counts: {n_exceed} of {n_perm}")
    return (n_exceed + 1) / (n_perm + 1)


def draw_permutation(rng: CounterRNG, draw: int, n_rows: int, attempt: int = 0) -> np.ndarray:
    return rng.child(draw, attempt).permutation(n_rows)


def perm_test(
    x,
    y,
    metric: Metric | str = Metric.SPEARMAN_RSA,
    n: int = DEFAULT_N_PERM,
    seed: int = 0,
    batch_size: int = DEFAULT_BATCH,
    permute: str = "y",
) -> PermResult:
    """Permute the rows of one modality ``n`` times and compare against the observed score.

    Draw ``b`` uses the stream ``CounterRNG(seed).child(b, 0)``; the retry of a
    failed draw uses ``child(b, 1)``, and a draw that fails twice counts as
    exceeding the observed score. Results do not depend on ``batch_size``.
    If the observed score itself is undefined (e.g. a constant modality) the
    test returns ``p = 1`` with a NaN observed value.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    metric = Metric.parse(metric) if isinstance(metric, str) else Metric(metric)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if permute not in ("x", "y"):
        raise ValueError("permute must be 'x' or 'y'")
    # every metric is symmetric, so the shuffled side is simply passed second
    fixed, moving = (x, y) if permute == "y" else (y, x)
    rng = CounterRNG(seed)
    try:
        score = permutation_scorer(metric, fixed, moving)
        observed = score(None)
    except RSAError as exc:
        warnings.warn(f"observed {metric.value} undefined ({exc}); p set to 1", RSAWarning)
        return PermResult(math.nan, n, math.nan, math.nan, 1.0, seed, n_exceed=n, n_failed=n)

    rows = moving.shape[0]
    null = np.empty(n)
    failed = np.zeros(n, dtype=bool)
    for start in range(0, n, batch_size):
        for b in range(start, min(start + batch_size, n)):
            for attempt in (0, 1):
                try:
                    null[b] = score(draw_permutation(rng, b, rows, attempt))
                    break
                except RSAError:
                    continue
            else:
                null[b] = math.nan
                failed[b] = True
    if failed.any():
        warnings.warn(f"{int(failed.sum())} null draw(s) failed twice; counted as exceeding", RSAWarning)
    ok = null[~failed]
    n_exceed = int(np.sum(ok >= observed)) + int(failed.sum())
    return PermResult(
        observed=float(observed),
        n_perm=n,
        null_mean=float(ok.mean()) if ok.size else math.nan,
        null_sd=float(ok.std()) if ok.size else math.nan,
        p_value=p_value(n_exceed, n),
        seed=seed,
        n_exceed=n_exceed,
        n_failed=int(failed.sum()),
    )
