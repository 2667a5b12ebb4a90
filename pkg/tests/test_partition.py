import itertools
import math

import numpy as np
import pytest

from trimodal_rsa.errors import MissingFeatures, RSAWarning, ZeroVarianceAcrossSentences
from trimodal_rsa.partition import affect_label, affect_partition, group_summary, kmeans, prosody_partition, valence


def test_valence_examples():
    assert valence((1, 0, 0)) == pytest.approx(0.55)
    assert affect_label(valence((1, 0, 0))) == "positive"
    assert affect_label(valence((0, 0, 0))) == "neutral"
    assert valence((-1, 1, 1)) == pytest.approx(-1.0)
    assert affect_label(-1.0) == "negative"


def test_strict_thresholds():
    assert [affect_label(v, 0.45) for v in (0.5, 0.45, -0.46, -0.45)] == ["positive", "neutral", "negative", "neutral"]


def test_affect_partition_and_rescaling():
    r = np.random.default_rng(0)
    feats = {f"s{i}": tuple(r.standard_normal(3)) for i in range(12)}
    labels = affect_partition(feats)
    scaled = affect_partition({k: tuple(3.0 * np.asarray(v)) for k, v in feats.items()})
    assert {k: v.label for k, v in labels.items()} == {k: v.label for k, v in scaled.items()}
    assert set(labels) == set(feats)


def test_affect_errors():
    with pytest.raises(ZeroVarianceAcrossSentences):
        affect_partition({"only": (1.0, 2.0, 3.0)})
    with pytest.raises(MissingFeatures, match="b"):
        affect_partition({"a": (1.0, 2.0, 3.0), "b": None})


def _wcss(points, labels):
    return sum(((points[labels == j] - points[labels == j].mean(axis=0)) ** 2).sum() for j in set(labels.tolist()))


def test_kmeans_recovers_pairs():
    pts = np.array([[0.0, 0.0], [0.0, 1.0], [100.0, 0.0], [100.0, 1.0]])
    res = kmeans(pts, 2, seed=3)
    best = min(
        (np.array(lab) for lab in itertools.product((0, 1), repeat=4) if len(set(lab)) == 2),
        key=lambda lab: _wcss(pts, lab),
    )
    assert _wcss(pts, res.labels) == pytest.approx(_wcss(pts, best))
    assert res.labels[0] == res.labels[1] != res.labels[2] == res.labels[3]


def test_kmeans_k_equals_rows():
    pts = np.random.default_rng(1).standard_normal((5, 3))
    res = kmeans(pts, 5)
    assert sorted(res.labels.tolist()) == [0, 1, 2, 3, 4]
    assert res.wcss == pytest.approx(0.0, abs=1e-20)


def test_kmeans_identical_points():
    with pytest.warns(RSAWarning, match="EmptyCluster"):
        res = kmeans(np.ones((6, 2)), 2)
    assert res.wcss == 0.0


def test_kmeans_monotone_and_fixed_point():
    pts = np.random.default_rng(2).standard_normal((80, 13))
    res = kmeans(pts, 4, seed=9)
    h = res.wcss_history
    assert all(b <= a + 1e-9 for a, b in zip(h, h[1:]))
    assert res.converged
    d = ((pts[:, None, :] - res.centroids[None]) ** 2).sum(axis=2)
    assert np.array_equal(np.argmin(d, axis=1), res.labels)
    again = kmeans(pts, 4, seed=9)
    assert np.array_equal(again.labels, res.labels)


def test_prosody_partition_is_exhaustive():
    r = np.random.default_rng(3)
    rows = {f"s{i}": tuple(r.standard_normal(13)) for i in range(10)}
    clusters, _ = prosody_partition(rows, k=4, seed=1)
    members = sorted(m for c in clusters for m in c.members)
    assert members == sorted(rows)
    with pytest.raises(MissingFeatures):
        prosody_partition({**rows, "x": None})


def test_group_summary_examples():
    groups = {"a": "g1", "b": "g1", "c": "g2", "d": "g2"}
    scores = {"a": {"tnc": 0.2}, "b": {"tnc": 0.4}, "c": {"tnc": 0.7}, "d": {"tnc": math.nan}}
    rows = {r.group: r for r in group_summary(groups, scores, ["tnc"], ["g1", "g2", "g3"])}
    assert rows["g1"].mean == pytest.approx(0.3) and rows["g1"].sd == pytest.approx(0.1) and rows["g1"].n == 2
    assert rows["g2"].sd == 0.0 and rows["g2"].n == 1 and rows["g2"].n_excluded == 1
    assert rows["g3"].n == 0 and math.isnan(rows["g3"].mean)
