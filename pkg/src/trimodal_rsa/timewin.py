"""Millisecond windows on the token-synchronous axis and window-restricted RSA."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadBounds, RSAError
from .metrics import spearman_rsa
from .rdm import build_rdm, vec_upper

DEFAULT_WINDOWS_MS = ((0.0, 250.0), (250.0, 500.0), (500.0, 750.0), (750.0, 1000.0))
MIN_TOKENS = 2  # fewer tokens than this: the window is omitted outright
MIN_RDM_ENTRIES = 3  # RSA needs variance in both RDM vectors


@dataclass(frozen=True)
class TokenWindow:
    a_ms: float
    b_ms: float
    indices: np.ndarray  # 0-based token indices, strictly increasing

    @property
    def degenerate(self) -> bool:
        return self.indices.size < MIN_TOKENS


def token_times(t_a: int, duration_ms: float) -> np.ndarray:
    """Onset time in ms of each token: (t-1) * D / T_a for 1-based t."""
    return np.arange(t_a) * (duration_ms / t_a)


def token_window(t_a: int, duration_ms: float, a_ms: float, b_ms: float) -> TokenWindow:
    """Tokens whose onset lies in [a, min(b, D))."""
    if not (0.0 <= a_ms < b_ms) or t_a < 2 or not duration_ms > 0:
        raise BadBounds(f"invalid window [{a_ms}, {b_ms}) for T_a={t_a}, D={duration_ms}")
    tau = token_times(t_a, duration_ms)
    hi = min(b_ms, duration_ms)
    return TokenWindow(a_ms, b_ms, np.flatnonzero((tau >= a_ms) & (tau < hi)))


@dataclass(frozen=True)
class WindowRow:
    a_ms: float
    b_ms: float
    n_tokens: int
    rsa: float
    status: str  # "ok", or the reason the window has no score


def windowed_rsa(eeg, llm, duration_ms: float, windows=DEFAULT_WINDOWS_MS) -> list[WindowRow]:
    """Spearman RSA between the two modalities restricted to each window's tokens."""
    eeg = np.asarray(eeg, dtype=np.float64)
    llm = np.asarray(llm, dtype=np.float64)
    if eeg.shape[0] != llm.shape[0]:
        raise RSAError("EEG and model states are not on the same token axis")
    t_a = eeg.shape[0]
    rows = []
    for a, b in windows:
        win = token_window(t_a, duration_ms, a, b)
        n = int(win.indices.size)
        if win.degenerate:
            rows.append(WindowRow(a, b, n, math.nan, f"omitted: {n} token(s) < {MIN_TOKENS}"))
            continue
        if n * (n - 1) // 2 < MIN_RDM_ENTRIES:
            rows.append(WindowRow(a, b, n, math.nan, f"null: RDM vector length {n * (n - 1) // 2} < {MIN_RDM_ENTRIES}"))
            continue
        try:
            ve = vec_upper(build_rdm(eeg[win.indices]))
            vl = vec_upper(build_rdm(llm[win.indices]))
            rows.append(WindowRow(a, b, n, spearman_rsa(ve, vl).value, "ok"))
        except RSAError as exc:
            rows.append(WindowRow(a, b, n, math.nan, f"null: {exc}"))
    return rows
