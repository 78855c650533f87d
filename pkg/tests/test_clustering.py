"""Seeded k-means, silhouette scoring, K selection, exemplar picking."""

import numpy as np
import pytest

from gridplan.errors import DataError
from gridplan.scenarios import cluster_and_pick_reps, kmeans, select_k, silhouette_score


def _blobs(rng, centers, n_per, spread=0.05):
    pts, labels = [], []
    for j, c in enumerate(centers):
        pts.append(np.asarray(c) + rng.normal(0, spread, size=(n_per, len(c))))
        labels.extend([j] * n_per)
    return np.vstack(pts), np.array(labels)


def test_kmeans_recovers_separated_blobs():
    rng = np.random.default_rng(0)
    pts, truth = _blobs(rng, [(0, 0), (10, 0), (0, 10)], 20)
    labels, centroids, inertia = kmeans(pts, 3, seed=0)
    # perfect purity: every truth group maps to exactly one cluster label
    for g in range(3):
        assert len(set(labels[truth == g])) == 1
    assert len(set(labels)) == 3
    assert inertia < 20 * 3 * 0.05**2 * 2 * 10


def test_kmeans_deterministic():
    rng = np.random.default_rng(1)
    pts, _ = _blobs(rng, [(0, 0), (5, 5)], 15)
    a = kmeans(pts, 2, seed=7)
    b = kmeans(pts, 2, seed=7)
    assert np.array_equal(a[0], b[0])
    assert np.array_equal(a[1], b[1])
    assert a[2] == b[2]


def test_kmeans_restarts_never_hurt():
    rng = np.random.default_rng(2)
    pts = rng.random((40, 3))
    single = kmeans(pts, 4, seed=3, restarts=1)[2]
    multi = kmeans(pts, 4, seed=3, restarts=10)[2]
    assert multi <= single + 1e-12


def test_kmeans_rejects_bad_k():
    pts = np.random.default_rng(0).random((5, 2))
    with pytest.raises(DataError, match="invalid"):
        kmeans(pts, 6, seed=0)
    with pytest.raises(DataError, match="invalid"):
        kmeans(pts, 0, seed=0)


def test_silhouette_two_pair_oracle():
    # two tight pairs far apart, 1-D. For every point: a = 0.1 (its twin),
    # b = mean distance to the far pair = (9.9 + 10.0) / 2 = 9.95 for the
    # inner points and (10.0 + 10.1) / 2 = 10.05 for the outer ones.
    pts = np.array([[0.0], [0.1], [10.0], [10.1]])
    labels = np.array([0, 0, 1, 1])
    s_outer = (10.05 - 0.1) / 10.05
    s_inner = (9.95 - 0.1) / 9.95
    expected = (2 * s_outer + 2 * s_inner) / 4
    assert silhouette_score(pts, labels) == pytest.approx(expected, abs=1e-12)


def test_silhouette_singleton_contributes_zero():
    # cluster {0, 1} plus singleton {10}: s(0) = 1 - 1/10 = 0.9,
    # s(1) = 1 - 1/9 = 8/9, singleton scores 0 by convention
    pts = np.array([[0.0], [1.0], [10.0]])
    labels = np.array([0, 0, 1])
    expected = (0.9 + 8.0 / 9.0 + 0.0) / 3
    assert silhouette_score(pts, labels) == pytest.approx(expected, abs=1e-12)


def test_silhouette_rejects_single_cluster():
    with pytest.raises(DataError, match="single cluster"):
        silhouette_score(np.random.default_rng(0).random((4, 2)), np.zeros(4, dtype=int))


def test_select_k_finds_planted_count():
    rng = np.random.default_rng(4)
    pts, _ = _blobs(rng, [(0, 0), (8, 0), (0, 8), (8, 8)], 15)
    assert select_k(pts, k_min=2, k_max=8, seed=0) == 4


def test_select_k_small_sample_fallback():
    pts = np.random.default_rng(0).random((5, 2))
    assert select_k(pts, k_min=7, k_max=20, seed=0) == 4  # n - 1


def test_reps_are_cluster_members():
    rng = np.random.default_rng(5)
    pts, truth = _blobs(rng, [(0, 0), (6, 6), (12, 0)], 12)
    days = np.arange(100, 100 + len(pts))
    res = cluster_and_pick_reps(pts, 3, seed=0, day_index=days)
    assert res.k == 3
    assert sorted(res.assignments[res.rep_rows]) == [0, 1, 2]
    for j in range(3):
        members = np.flatnonzero(res.assignments == j)
        assert res.rep_rows[j] in members
        day, weight = res.rep_days[j]
        assert day == days[res.rep_rows[j]]
        assert weight == pytest.approx(len(members) / 365.0)
    # rep is the member closest to its centroid
    for j in range(3):
        members = np.flatnonzero(res.assignments == j)
        d = np.linalg.norm(pts[members] - res.centroids[j], axis=1)
        assert np.linalg.norm(pts[res.rep_rows[j]] - res.centroids[j]) <= d.min() + 1e-12


def test_rep_distance_tie_breaks_to_earliest_day():
    # two points symmetric about the centroid, exactly equidistant
    pts = np.array([[0.0, 0.0], [2.0, 0.0], [50.0, 0.0]])
    days = np.array([30, 10, 99])
    res = cluster_and_pick_reps(pts, 2, seed=0, day_index=days)
    pair_cluster = res.assignments[0]
    assert res.assignments[1] == pair_cluster
    j = int(pair_cluster)
    assert res.rep_days[j][0] == 10  # earlier day wins the tie
