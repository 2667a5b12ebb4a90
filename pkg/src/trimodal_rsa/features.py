"""Electrode-wise enriched EEG features and electrode-resolved similarity.

Every feature lives on the token-synchronous axis. For one electrode the
enriched sequence stacks, per token, in this column order:

    raw, diff1, diff2,
    (mean_w, std_w, max_w) for w in stats_windows,
    rms_w for w in stats_windows,
    band powers (one per band) for w in fft_windows

so the width is ``3 + 3*|stats| + |stats| + |fft|*|bands|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import BadWindow, RSAError, TooShort
from .metrics import _pearson
from .rdm import build_rdm, rank_transform, vec_upper

DEFAULT_STATS_WINDOWS = (3, 5, 9)
DEFAULT_FFT_WINDOWS = (8, 16, 32)
# octave bands as fractions of the token-grid Nyquist; the first band holds DC
DEFAULT_BANDS = ((0.0, 1 / 16), (1 / 16, 1 / 8), (1 / 8, 1 / 4), (1 / 4, 1 / 2), (1 / 2, 1.0))


@dataclass(frozen=True)
class BandSpec:
    bands: tuple[tuple[float, float], ...] = DEFAULT_BANDS
    taper: str = "rectangular"

    def __post_init__(self):
        for lo, hi in self.bands:
            if not 0.0 <= lo < hi <= 1.0:
                raise BadWindow(f"band ({lo}, {hi}) must satisfy 0 <= low < high <= 1")
        if self.taper not in ("rectangular", "hann"):
            raise BadWindow(f"unknown taper {self.taper!r}")

    def bin_mask(self, w_fft: int) -> np.ndarray:
        """|bands| x (w_fft/2 + 1) membership of one-sided DFT bins.

        Bin k sits at 2k/w_fft of Nyquist; bands are half-open except that a
        band reaching 1.0 includes the Nyquist bin.
        """
        f = 2.0 * np.arange(w_fft // 2 + 1) / w_fft
        mask = np.zeros((len(self.bands), f.size), dtype=bool)
        for i, (lo, hi) in enumerate(self.bands):
            mask[i] = (f >= lo) & ((f < hi) | ((hi == 1.0) & (f == 1.0)))
        return mask


@dataclass(frozen=True)
class EnrichConfig:
    stats_windows: tuple[int, ...] = DEFAULT_STATS_WINDOWS
    fft_windows: tuple[int, ...] = DEFAULT_FFT_WINDOWS
    bands: BandSpec = field(default_factory=BandSpec)
    standardize: bool = True

    @property
    def width(self) -> int:
        ns = len(self.stats_windows)
        return 3 + 3 * ns + ns + len(self.fft_windows) * len(self.bands.bands)

    @property
    def min_length(self) -> int:
        return max(3, *self.stats_windows, *self.fft_windows)

    def column_names(self) -> list[str]:
        names = ["raw", "diff1", "diff2"]
        for w in self.stats_windows:
            names += [f"mean_w{w}", f"std_w{w}", f"max_w{w}"]
        names += [f"rms_w{w}" for w in self.stats_windows]
        for w in self.fft_windows:
            names += [f"band{b}_w{w}" for b in range(len(self.bands.bands))]
        return names


@dataclass(frozen=True)
class EnrichedSeq:
    values: np.ndarray  # t_a x d_r
    columns: tuple[str, ...]
    electrode: str = ""

    @property
    def t_a(self) -> int:
        return self.values.shape[0]

    @property
    def d_r(self) -> int:
        return self.values.shape[1]


def _series(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise RSAError(f"expected a 1-D series, got shape {x.shape}")
    return x


def diffs(series) -> tuple[np.ndarray, np.ndarray]:
    """First and second differences with zeros where the lag is unavailable."""
    e = _series(series)
    if e.size < 3:
        raise TooShort(f"differences need at least 3 samples, got {e.size}")
    d1 = np.zeros_like(e)
    d1[1:] = np.diff(e)
    d2 = np.zeros_like(e)
    d2[2:] = np.diff(d1)[1:]
    return d1, d2


def _centered_windows(e: np.ndarray, w: int) -> np.ndarray:
    """T x w view of the index window [t - floor((w-1)/2), t + ceil((w-1)/2)], NaN outside."""
    before = (w - 1) // 2
    after = w - 1 - before
    padded = np.concatenate((np.full(before, np.nan), e, np.full(after, np.nan)))
    return sliding_window_view(padded, w)


def _check_odd(w):
    if w < 3 or w % 2 == 0:
        raise BadWindow(f"window must be odd and >= 3, got {w}")


def windowed_stats(series, w: int) -> np.ndarray:
    """Columns (mean, population std, max) over boundary-truncated centered windows."""
    _check_odd(w)
    win = _centered_windows(_series(series), w)
    mu = np.nanmean(win, axis=1)
    sd = np.sqrt(np.nanmean((win - mu[:, None]) ** 2, axis=1))
    mx = np.nanmax(win, axis=1)
    return np.column_stack((mu, sd, mx))


def windowed_rms(series, w: int) -> np.ndarray:
    _check_odd(w)
    win = _centered_windows(_series(series), w)
    return np.sqrt(np.nanmean(win * win, axis=1))


def _taper(name: str, w: int) -> np.ndarray:
    if name == "hann":
        return np.hanning(w)
    return np.ones(w)


def segments(series, w_fft: int) -> np.ndarray:
    """T x w_fft centered segments, zero-padded past the sequence ends."""
    return np.nan_to_num(_centered_windows(_series(series), w_fft), nan=0.0)


def band_powers(series, w_fft: int, spec: BandSpec | None = None) -> np.ndarray:
    """T x |bands| sums of |X(k)|^2 over each band's one-sided DFT bins."""
    spec = spec or BandSpec()
    if w_fft < 4 or w_fft & (w_fft - 1):
        raise BadWindow(f"FFT window must be a power of two >= 4, got {w_fft}")
    seg = segments(series, w_fft) * _taper(spec.taper, w_fft)
    power = np.abs(np.fft.rfft(seg, axis=1)) ** 2
    return power @ spec.bin_mask(w_fft).T.astype(np.float64)


def enrich_electrode(series, cfg: EnrichConfig | None = None, electrode: str = "") -> EnrichedSeq:
    cfg = cfg or EnrichConfig()
    e = _series(series)
    if e.size < cfg.min_length:
        raise TooShort(f"sequence of length {e.size} shorter than the largest window {cfg.min_length}")
    d1, d2 = diffs(e)
    cols = [e, d1, d2]
    cols += [windowed_stats(e, w) for w in cfg.stats_windows]
    cols += [windowed_rms(e, w) for w in cfg.stats_windows]
    cols += [band_powers(e, w, cfg.bands) for w in cfg.fft_windows]
    values = np.column_stack(cols)
    return EnrichedSeq(values=values, columns=tuple(cfg.column_names()), electrode=electrode)


def standardize_features(values: np.ndarray) -> np.ndarray:
    """Column z-scores; columns without variance become zeros."""
    mu = values.mean(axis=0)
    sd = values.std(axis=0)
    scale = np.maximum(np.abs(mu), 1.0)
    live = sd > 1e-12 * scale
    out = np.zeros_like(values)
    out[:, live] = (values[:, live] - mu[live]) / sd[live]
    return out


def enriched_matrix(series, cfg: EnrichConfig | None = None) -> np.ndarray:
    """Enriched features ready for RDM construction (standardized per column if configured)."""
    cfg = cfg or EnrichConfig()
    values = enrich_electrode(series, cfg).values
    return standardize_features(values) if cfg.standardize else values


def _electrode_ranks(eeg: np.ndarray, cfg: EnrichConfig) -> list[np.ndarray | None]:
    out = []
    for c in range(eeg.shape[1]):
        try:
            out.append(rank_transform(vec_upper(build_rdm(enriched_matrix(eeg[:, c], cfg)))))
        except RSAError:
            out.append(None)
    return out


def _score_ranks(ranks, llm_ranks) -> np.ndarray:
    scores = np.full(len(ranks), math.nan)
    for c, r in enumerate(ranks):
        if r is None or llm_ranks is None:
            continue
        try:
            scores[c] = _pearson(r, llm_ranks)
        except RSAError:
            pass
    return scores


def _llm_ranks(llm):
    try:
        return rank_transform(vec_upper(build_rdm(llm)))
    except RSAError:
        return None


def electrode_similarity(eeg, llm, cfg: EnrichConfig | None = None) -> np.ndarray:
    """Spearman RSA of each electrode's enriched sequence against the model states.

    ``eeg`` is T_a x C (already on the token grid); ``llm`` is T_a x k.
    Returns C scores; electrodes that could not be scored are NaN.
    """
    cfg = cfg or EnrichConfig()
    eeg = np.asarray(eeg, dtype=np.float64)
    if eeg.shape[0] != np.shape(llm)[0]:
        raise RSAError("EEG and model states are not on the same token grid")
    return _score_ranks(_electrode_ranks(eeg, cfg), _llm_ranks(llm))


def layer_electrode_grid(eeg, layers, cfg: EnrichConfig | None = None) -> np.ndarray:
    """C x L matrix of electrode similarities, one column per layer."""
    cfg = cfg or EnrichConfig()
    eeg = np.asarray(eeg, dtype=np.float64)
    if any(np.shape(layer)[0] != eeg.shape[0] for layer in layers):
        raise RSAError("all layers must share the EEG token grid")
    ranks = _electrode_ranks(eeg, cfg)
    return np.column_stack([_score_ranks(ranks, _llm_ranks(layer)) for layer in layers])
