import math

import numpy as np
import pytest

from trimodal_rsa.errors import BadBounds
from trimodal_rsa.metrics import spearman_rsa
from trimodal_rsa.rdm import rdm_vec
from trimodal_rsa.timewin import DEFAULT_WINDOWS_MS, token_times, token_window, windowed_rsa


def test_degenerate_window_example():
    assert list(token_times(4, 1000.0)) == [0, 250, 500, 750]
    w = token_window(4, 1000.0, 250.0, 500.0)
    assert list(w.indices) == [1] and w.degenerate


def test_full_and_truncated_windows():
    assert list(token_window(10, 800.0, 0.0, 800.0).indices) == list(range(10))
    w = token_window(16, 800.0, 750.0, 1000.0)
    assert all(750 <= t < 800 for t in token_times(16, 800.0)[w.indices])
    assert list(w.indices) == [15]


def test_bad_bounds():
    with pytest.raises(BadBounds):
        token_window(10, 1000.0, 300.0, 200.0)
    with pytest.raises(BadBounds):
        token_window(10, 1000.0, -1.0, 200.0)


def test_default_windows_partition_tokens():
    t_a, dur = 37, 1300.0
    seen = np.concatenate([token_window(t_a, dur, a, b).indices for a, b in DEFAULT_WINDOWS_MS])
    assert len(seen) == len(set(seen.tolist()))
    assert sorted(seen.tolist()) == [i for i, t in enumerate(token_times(t_a, dur)) if t < 1000]


def test_identical_inputs_and_row_count():
    m = np.random.default_rng(0).standard_normal((40, 6))
    rows = windowed_rsa(m, m, 1200.0)
    assert len(rows) == 4
    assert all(r.rsa == pytest.approx(1.0) for r in rows)


def test_two_token_window_is_null():
    m = np.random.default_rng(1).standard_normal((8, 4))
    (row,) = windowed_rsa(m, m, 800.0, [(0.0, 200.0)])
    assert row.n_tokens == 2 and math.isnan(row.rsa) and row.status.startswith("null")


def test_full_range_equals_unwindowed():
    r = np.random.default_rng(2)
    a, b = r.standard_normal((30, 5)), r.standard_normal((30, 5))
    (row,) = windowed_rsa(a, b, 900.0, [(0.0, 900.0)])
    assert row.rsa == spearman_rsa(rdm_vec(a), rdm_vec(b)).value
