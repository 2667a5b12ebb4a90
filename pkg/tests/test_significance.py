import numpy as np
import pytest

from trimodal_rsa.errors import RSAWarning
from trimodal_rsa.metrics import Metric
from trimodal_rsa.significance import draw_permutation, p_value, perm_test
from trimodal_rsa.rng import CounterRNG


def test_estimator_arithmetic():
    assert p_value(0, 500) == 1 / 501
    assert p_value(500, 500) == 1.0
    assert p_value(24, 99) == 0.25


def test_identical_pair_hits_the_floor():
    hits = 0
    for seed in range(20):
        x = np.random.default_rng(seed).standard_normal((20, 5))
        hits += perm_test(x, x, Metric.PEARSON_RSA, n=500, seed=seed).p_value == 1 / 501
    assert hits == 20


def test_constant_modality_gives_p_one():
    x = np.random.default_rng(0).standard_normal((10, 3))
    with pytest.warns(RSAWarning):
        res = perm_test(x, np.ones((10, 3)), Metric.PEARSON_RSA, n=50)
    assert res.p_value == 1.0
    assert np.isnan(res.observed)


def test_p_value_on_grid_and_deterministic():
    r = np.random.default_rng(1)
    x, y = r.standard_normal((15, 4)), r.standard_normal((15, 4))
    a = perm_test(x, y, "CKALinear", n=99, seed=3)
    b = perm_test(x, y, "CKALinear", n=99, seed=3, batch_size=5)
    assert a == b
    assert 1 / 100 <= a.p_value <= 1
    assert round(a.p_value * 100, 9) == int(round(a.p_value * 100))
    assert a.n_perm == 99 and a.seed == 3


def test_permute_side_changes_stream_not_validity():
    r = np.random.default_rng(2)
    x, y = r.standard_normal((12, 3)), r.standard_normal((12, 3))
    rx = perm_test(x, y, n=50, permute="x")
    ry = perm_test(x, y, n=50, permute="y")
    assert rx.observed == pytest.approx(ry.observed)
    with pytest.raises(ValueError):
        perm_test(x, y, n=50, permute="both")


def test_draw_permutation_stream():
    rng = CounterRNG(5)
    p0 = draw_permutation(rng, 3, 10)
    assert np.array_equal(p0, CounterRNG(5).child(3, 0).permutation(10))
    assert not np.array_equal(p0, draw_permutation(rng, 3, 10, attempt=1))


def test_as_dict_keys():
    x = np.random.default_rng(3).standard_normal((8, 3))
    d = perm_test(x, x[::-1], n=10).as_dict()
    assert {"observed", "n_perm", "null_mean", "null_sd", "p_value", "seed"} <= set(d)
