import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trimodal_rsa.errors import RSAWarning
from trimodal_rsa.rdm import build_rdm, from_upper, rank_transform, vec_upper


def test_hand_rows():
    r = build_rdm(np.array([[1.0, 2.0], [2.0, 4.0], [1.0, 0.0]]))
    assert r[0, 1] == pytest.approx(0.0, abs=1e-12)
    assert r[0, 2] == pytest.approx(2.0, abs=1e-12)


def test_rdm_invariants(rng):
    m = rng.standard_normal((20, 7))
    r = build_rdm(m)
    assert np.array_equal(r, r.T)
    assert np.all(np.diag(r) == 0)
    assert r.min() >= 0 and r.max() <= 2


def test_row_affine_invariance(rng):
    m = rng.standard_normal((15, 6))
    scaled = m * rng.uniform(0.1, 5, (15, 1)) + rng.standard_normal((15, 1))
    np.testing.assert_allclose(build_rdm(scaled), build_rdm(m), atol=1e-9)


def test_constant_row_policy():
    m = np.array([[1.0, 1.0, 1.0], [1.0, 2.0, 3.0], [3.0, 1.0, 2.0]])
    with pytest.warns(RSAWarning, match="ConstantRow"):
        r = build_rdm(m)
    assert r[0, 1] == 1.0 and r[0, 2] == 1.0


def test_vec_upper_order_and_lengths():
    r = np.array([[0, 1, 2], [1, 0, 3], [2, 3, 0]], dtype=float)
    assert list(vec_upper(r)) == [1, 2, 3]
    assert vec_upper(np.zeros((2, 2))).size == 1
    assert vec_upper(np.zeros((5, 5))).size == 10


def test_vec_upper_roundtrip(rng):
    r = build_rdm(rng.standard_normal((9, 4)))
    assert np.array_equal(from_upper(vec_upper(r), 9), r)


def test_rank_examples():
    assert list(rank_transform([0.3, 0.1, 0.2])) == [3, 1, 2]
    assert list(rank_transform([5, 5, 1])) == [2.5, 2.5, 1]
    assert list(rank_transform([4.0] * 5)) == [3.0] * 5


@given(st.lists(st.integers(-1000, 1000), min_size=2, max_size=40))
def test_rank_sum_and_monotone_invariance(v):
    r = rank_transform(v)
    m = len(v)
    assert r.min() >= 1 and r.max() <= m
    assert r.sum() == m * (m + 1) / 2
    v = np.asarray(v, dtype=float)
    assert np.array_equal(rank_transform(v**3 + 2 * v + 7), r)
