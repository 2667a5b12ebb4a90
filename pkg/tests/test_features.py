import math

import numpy as np
import pytest

from trimodal_rsa.errors import BadWindow, RSAWarning, TooShort
from trimodal_rsa.features import (
    BandSpec,
    EnrichConfig,
    band_powers,
    diffs,
    electrode_similarity,
    enrich_electrode,
    enriched_matrix,
    layer_electrode_grid,
    windowed_rms,
    windowed_stats,
)


def test_diffs_hand_example():
    d1, d2 = diffs([1.0, 2.0, 4.0])
    assert list(d1) == [0, 1, 2]
    assert list(d2) == [0, 0, 1]
    c1, c2 = diffs(np.full(6, 3.0))
    assert not c1.any() and not c2.any()
    r1, r2 = diffs(np.arange(8.0) * 2)
    assert np.all(r1[1:] == 2) and not r2.any()
    with pytest.raises(TooShort):
        diffs([1.0, 2.0])


def test_windowed_stats_hand_example():
    s = windowed_stats([1.0, 2.0, 4.0], 3)
    mu, sd, mx = s[1]
    assert mu == pytest.approx(7 / 3)
    assert sd == pytest.approx(math.sqrt(14 / 9))
    assert mx == 4.0
    assert s[0, 0] == pytest.approx(1.5) and s[0, 2] == 2.0
    c = windowed_stats(np.full(7, 2.5), 5)
    assert np.all(c[:, 1] == 0) and np.all(c[:, 0] == 2.5) and np.all(c[:, 2] == 2.5)
    with pytest.raises(BadWindow):
        windowed_stats([1.0, 2.0, 3.0, 4.0], 4)


def test_windowed_rms():
    assert windowed_rms([3.0, 4.0], 3)[0] == pytest.approx(math.sqrt(12.5))
    np.testing.assert_allclose(windowed_rms([-2.0, 2.0, -2.0, 2.0, -2.0], 3), 2.0)
    assert not windowed_rms(np.zeros(5), 3).any()


def test_band_powers_constant_and_alternating():
    spec = BandSpec()
    const = band_powers(np.full(40, 3.0), 16, spec)
    # interior tokens see a full constant segment: energy only in the DC band
    assert np.allclose(const[10:30, 1:], 0.0, atol=1e-18)
    alt = np.array([1.0, -1.0] * 20)
    p = band_powers(alt, 8, spec)[10:30]
    assert np.allclose(p[:, :-1], 0.0, atol=1e-18)
    assert np.allclose(p[:, -1], 64.0)  # |X(N/2)|^2 = w^2 for a full +-1 segment


def test_band_powers_sinusoid_direct_dft():
    w = 8
    t = np.arange(w)
    x = np.cos(2 * np.pi * 0.25 * t)  # bin 2 of an 8-point DFT
    series = np.concatenate([np.zeros(20), x, np.zeros(20)])
    centre = 20 + (w - 1) // 2
    spec = BandSpec()
    p = band_powers(series, w, spec)[centre]
    brute = [abs(sum(x[n] * np.exp(-2j * np.pi * k * n / w) for n in range(w))) ** 2 for k in range(w // 2 + 1)]
    assert brute[2] == pytest.approx(16.0)
    band = int(np.flatnonzero(spec.bin_mask(w)[:, 2])[0])
    assert p[band] == pytest.approx(brute[2], rel=1e-12)
    assert p.sum() == pytest.approx(sum(brute), rel=1e-12)


def test_band_window_validation():
    with pytest.raises(BadWindow):
        band_powers(np.zeros(20), 12)
    with pytest.raises(BadWindow):
        BandSpec(bands=((0.5, 0.2),))


def test_enrich_widths():
    assert EnrichConfig().width == 30
    seq = enrich_electrode(np.random.default_rng(0).standard_normal(40))
    assert seq.d_r == 30 and seq.t_a == 40 and len(seq.columns) == 30
    one = EnrichConfig(stats_windows=(5,), fft_windows=(8,))
    assert one.width == 3 + 3 + 1 + 5
    with pytest.raises(TooShort):
        enrich_electrode(np.zeros(20))


def test_enrich_constant_input():
    seq = enrich_electrode(np.full(40, 2.0))
    cols = dict(zip(seq.columns, seq.values.T))
    assert not cols["diff1"].any() and not cols["diff2"].any()
    for w in (3, 5, 9):
        assert not cols[f"std_w{w}"].any()
        assert np.all(cols[f"mean_w{w}"] == 2.0) and np.all(cols[f"rms_w{w}"] == 2.0)


def test_similarity_null_and_copy():
    r = np.random.default_rng(3)
    noise_means = []
    wins = 0
    for _ in range(20):
        eeg = r.standard_normal((100, 4))
        llm = r.standard_normal((100, 8))
        noise_means.append(np.mean(np.abs(electrode_similarity(eeg, llm))))
        signal = r.standard_normal(100).cumsum()
        two = np.column_stack([signal, r.standard_normal(100)])
        s = electrode_similarity(two, enriched_matrix(signal))
        wins += s[0] > s[1]
    assert np.mean(noise_means) < 0.1
    assert wins >= 19


def test_similarity_identical_rdm_gives_one():
    r = np.random.default_rng(4)
    eeg = np.tile(r.standard_normal(40).cumsum()[:, None], (1, 3))
    s = electrode_similarity(eeg, enriched_matrix(eeg[:, 0]))
    np.testing.assert_allclose(s, 1.0)


def test_similarity_global_scale_invariance():
    r = np.random.default_rng(5)
    eeg = r.standard_normal((50, 3))
    llm = r.standard_normal((50, 6))
    np.testing.assert_allclose(electrode_similarity(7.5 * eeg, llm), electrode_similarity(eeg, llm), atol=1e-9)


def test_flat_electrode_reported_missing():
    r = np.random.default_rng(6)
    eeg = np.column_stack([r.standard_normal(40), np.zeros(40)])
    with pytest.warns(RSAWarning):
        s = electrode_similarity(eeg, r.standard_normal((40, 5)))
    assert np.isfinite(s[0]) and np.isnan(s[1])


def test_layer_grid():
    r = np.random.default_rng(7)
    eeg = r.standard_normal((40, 3))
    layer = r.standard_normal((40, 6))
    grid = layer_electrode_grid(eeg, [layer, layer])
    assert grid.shape == (3, 2)
    assert np.array_equal(grid[:, 0], grid[:, 1])
    np.testing.assert_array_equal(layer_electrode_grid(eeg, [layer])[:, 0], electrode_similarity(eeg, layer))
    assert np.all(np.abs(grid) <= 1)
