import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_orthogonal
from trimodal_rsa.errors import AllTies, DegenerateGram, RSAWarning, ShapeMismatch, ZeroVariance
from trimodal_rsa.metrics import (
    ALL_METRICS,
    BOUNDS,
    Metric,
    cka,
    compute,
    count_inversions,
    dcor,
    kendall_counts,
    kendall_tau_b,
    mi_gauss,
    pearson_rsa,
    permutation_scorer,
    rv_coefficient,
    spearman_rsa,
)
from trimodal_rsa.rdm import build_rdm, rank_transform


def test_pearson_examples():
    a = np.array([0.0, 1.0, 2.0, 5.0])
    assert pearson_rsa(a, a).value == pytest.approx(1.0)
    assert pearson_rsa(a, 2 * a + 0.1).value == pytest.approx(1.0)
    assert pearson_rsa([0, 1, 2], [2, 1, 0]).value == pytest.approx(-1.0)
    with pytest.raises(ZeroVariance):
        pearson_rsa([1, 1, 1], [1, 2, 3])


def test_spearman_examples():
    a = np.array([0.1, 0.5, 0.3, 0.9])
    assert spearman_rsa(a, np.exp(a)).value == pytest.approx(1.0)
    assert spearman_rsa([1, 2, 3, 4], [1, 3, 2, 4]).value == pytest.approx(0.8)
    assert spearman_rsa(a, -a).value == pytest.approx(-1.0)
    with pytest.raises(ZeroVariance):
        spearman_rsa([2, 2, 2], [1, 2, 3])


def test_spearman_is_pearson_on_ranks(rng):
    a = np.round(rng.standard_normal(200), 1)
    b = np.round(rng.standard_normal(200), 1)
    assert spearman_rsa(a, b).value == pearson_rsa(rank_transform(a), rank_transform(b)).value


def test_kendall_examples():
    assert kendall_tau_b([1, 2, 3], [3, 2, 1]).value == -1.0
    assert kendall_counts([1, 1, 2], [1, 2, 2]) == (1, 0, 1, 1)
    assert kendall_tau_b([1, 1, 2], [1, 2, 2]).value == pytest.approx(0.5)
    with pytest.raises(AllTies):
        kendall_tau_b([1, 1, 1], [1, 2, 3])


def test_count_inversions():
    assert count_inversions([3, 1, 2]) == 2
    assert count_inversions(list(range(10))) == 0
    assert count_inversions(list(range(10))[::-1]) == 45


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=2, max_size=60))
def test_kendall_counts_match_enumeration(pairs):
    a = [p[0] for p in pairs]
    b = [p[1] for p in pairs]
    c = d = ta = tb = 0
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            s = (a[i] - a[j]) * (b[i] - b[j])
            if s > 0:
                c += 1
            elif s < 0:
                d += 1
            elif a[i] == a[j] and b[i] != b[j]:
                ta += 1
            elif a[i] != a[j] and b[i] == b[j]:
                tb += 1
    assert kendall_counts(a, b) == (c, d, ta, tb)


def test_dcor_identity_and_orthogonal(rng):
    x = rng.standard_normal((30, 4))
    q = random_orthogonal(rng, 4)
    assert dcor(x, x).value == pytest.approx(1.0, abs=1e-12)
    assert dcor(x, x @ q).value == pytest.approx(1.0, abs=1e-9)
    y = rng.standard_normal((30, 2))
    assert dcor(x, y).value == pytest.approx(dcor(y, x).value, abs=1e-12)
    assert dcor(x + 5.0, y).value == pytest.approx(dcor(x, y).value, abs=1e-9)


def test_dcor_null_oracle():
    below = 0
    for seed in range(20):
        r = np.random.default_rng(seed)
        below += dcor(r.standard_normal((2000, 1)), r.standard_normal((2000, 1))).value < 0.08
    assert below >= 19


def test_dcor_degenerate_is_zero():
    with pytest.warns(RSAWarning):
        assert dcor(np.ones((5, 2)), np.arange(10.0).reshape(5, 2)).value == 0.0


def test_rv_examples(rng):
    x = rng.standard_normal((12, 3))
    assert rv_coefficient(x, x).value == pytest.approx(1.0)
    assert rv_coefficient(x, x @ random_orthogonal(rng, 3)).value == pytest.approx(1.0)
    x4 = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
    assert rv_coefficient(x4, x4[:, :1]).value == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    with pytest.raises(ZeroVariance):
        rv_coefficient(np.ones((4, 2)), x4)


def test_mi_examples(rng):
    a = rng.standard_normal(400)
    a -= a.mean()
    b = rng.standard_normal(400)
    b -= b.mean()
    b -= (a @ b) / (a @ a) * a
    a /= np.linalg.norm(a)
    b /= np.linalg.norm(b)
    x = a.reshape(20, 20)
    y = (0.5 * a + math.sqrt(0.75) * b).reshape(20, 20)
    assert mi_gauss(x, y).value == pytest.approx(0.143841036225890, abs=1e-9)
    assert mi_gauss(x, b.reshape(20, 20)).value == pytest.approx(0.0, abs=1e-12)
    assert mi_gauss(x, x).value == pytest.approx(-0.5 * math.log(1e-12), rel=1e-12)
    with pytest.raises(ShapeMismatch):
        mi_gauss(x, y[:, :10])


def test_mi_monotone_in_r():
    base = np.linspace(-1, 1, 50)
    other = np.cos(np.arange(50))
    vals = [mi_gauss(base[:, None], (base + s * other)[:, None]).value for s in (4.0, 2.0, 1.0, 0.5, 0.1)]
    assert all(u < v for u, v in zip(vals, vals[1:]))


def test_cka_examples(rng):
    x = rng.standard_normal((25, 5))
    q = random_orthogonal(rng, 5)
    assert cka(x, x).value == pytest.approx(1.0)
    assert cka(x, x, "rbf").value == pytest.approx(1.0)
    assert cka(x, -3.0 * x @ q).value == pytest.approx(1.0, abs=1e-12)
    assert cka(x, x @ q, "rbf").value == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(DegenerateGram):
        cka(np.ones((6, 3)), x[:6])


def test_symmetry_and_bounds(rng):
    for _ in range(30):
        t = int(rng.integers(5, 40))
        x = rng.standard_normal((t, 4))
        y = rng.standard_normal((t, 4)) + rng.uniform(-1, 1) * x
        rx, ry = build_rdm(x), build_rdm(y)
        for m in ALL_METRICS:
            s = compute(m, x, y, rx, ry).value
            lo, hi = BOUNDS[m]
            assert lo - 1e-9 <= s <= hi + 1e-9
            if not m.uses_rdm:
                assert s == pytest.approx(compute(m, y, x).value, abs=1e-12)


@pytest.mark.parametrize("metric", ALL_METRICS)
def test_permutation_scorer_matches_recompute(metric, rng):
    x = rng.standard_normal((15, 4))
    y = rng.standard_normal((15, 4))
    f = permutation_scorer(metric, x, y)
    assert f(None) == pytest.approx(compute(metric, x, y).value, abs=1e-12)
    for _ in range(3):
        p = rng.permutation(15)
        assert f(p) == pytest.approx(compute(metric, x, y[p]).value, abs=1e-12)


def test_metric_parse():
    assert Metric.parse("spearman") is Metric.SPEARMAN_RSA
    assert Metric.parse("CKA-RBF") is Metric.CKA_RBF
    assert Metric.parse("KendallTauB") is Metric.KENDALL_TAU_B
    with pytest.raises(ValueError):
        Metric.parse("cosine")
