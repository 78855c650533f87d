"""Seeded k-means, silhouette scoring, K selection, representative days."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from gridplan.core.types import DAYS
from gridplan.errors import DataError

log = logging.getLogger(__name__)

KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 300
KMEANS_REL_TOL = 1e-6


@dataclass(frozen=True)
class ClusterResult:
    k: int
    assignments: np.ndarray  # cluster label per input row
    centroids: np.ndarray  # (k, dim)
    silhouette: float
    rep_days: tuple[tuple[int, float], ...]  # (absolute day index, weight |C|/365) per cluster
    rep_rows: np.ndarray  # row position of each representative within `points`


def _run_rng(seed: int, k: int, restart: int) -> np.random.Generator:
    # stream depends only on (seed, k, restart) so K selection and the final
    # clustering at the chosen K reproduce the same run
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(k, restart)))


def _kmeans_once(points: np.ndarray, k: int, rng: np.random.Generator):
    n = points.shape[0]
    # k-means++ seeding
    centroids = np.empty((k, points.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = points[first]
    closest_sq = np.sum((points - centroids[0]) ** 2, axis=1)
    for j in range(1, k):
        total = closest_sq.sum()
        if total <= 0:
            centroids[j] = points[int(rng.integers(n))]
            continue
        probs = closest_sq / total
        pick = int(rng.choice(n, p=probs))
        centroids[j] = points[pick]
        closest_sq = np.minimum(closest_sq, np.sum((points - centroids[j]) ** 2, axis=1))

    labels = np.zeros(n, dtype=int)
    for _ in range(KMEANS_MAX_ITER):
        d2 = np.sum((points[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
        labels = np.argmin(d2, axis=1)
        new_centroids = centroids.copy()
        for j in range(k):
            members = points[labels == j]
            if len(members):
                new_centroids[j] = members.mean(axis=0)
            else:
                # re-seed an emptied cluster from the point farthest
                # from its current centroid
                far = int(np.argmax(d2[np.arange(n), labels]))
                new_centroids[j] = points[far]
        shift = np.linalg.norm(new_centroids - centroids)
        scale = np.linalg.norm(centroids) + 1e-12
        centroids = new_centroids
        if shift / scale < KMEANS_REL_TOL:
            break
    d2 = np.sum((points[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(n), labels].sum())
    return labels, centroids, inertia


def kmeans(points: np.ndarray, k: int, seed: int, restarts: int = KMEANS_RESTARTS):
    """Best-of-restarts k-means. Returns (labels, centroids, inertia)."""
    if k < 1 or k > points.shape[0]:
        raise DataError(f"k={k} invalid for {points.shape[0]} points")
    best = None
    for r in range(restarts):
        run = _kmeans_once(points, k, _run_rng(seed, k, r))
        if best is None or run[2] < best[2] - 1e-12:
            best = run
    return best


def silhouette_score(points: np.ndarray, assignments: np.ndarray) -> float:
    labels = np.asarray(assignments)
    uniq = np.unique(labels)
    if len(uniq) < 2:
        raise DataError("silhouette undefined for a single cluster")
    n = points.shape[0]
    dist = np.sqrt(
        np.maximum(
            np.sum(points**2, axis=1)[:, None]
            + np.sum(points**2, axis=1)[None, :]
            - 2 * points @ points.T,
            0.0,
        )
    )
    scores = np.zeros(n)
    sizes = {int(c): int(np.sum(labels == c)) for c in uniq}
    for i in range(n):
        c = labels[i]
        if sizes[int(c)] == 1:
            continue  # singleton convention: contributes 0
        same = labels == c
        a = dist[i, same].sum() / (sizes[int(c)] - 1)
        b = np.inf
        for other in uniq:
            if other == c:
                continue
            b = min(b, dist[i, labels == other].mean())
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return float(scores.mean())


def select_k(points: np.ndarray, k_min: int = 7, k_max: int = 20, seed: int = 0) -> int:
    """Pick the cluster count with the best silhouette over [k_min, k_max]."""
    n = points.shape[0]
    if n <= k_min:
        log.warning("only %d points for k_min=%d; falling back to k=%d", n, k_min, n - 1)
        return max(n - 1, 1)
    lo = max(k_min, 2)
    hi = min(k_max, n - 1)
    best_k, best_score = lo, -np.inf
    for k in range(lo, hi + 1):
        labels, _, _ = kmeans(points, k, seed)
        score = silhouette_score(points, labels)
        if score > best_score + 1e-12:  # ties break toward smaller k
            best_k, best_score = k, score
    return best_k


def cluster_and_pick_reps(
    points: np.ndarray, k: int, seed: int, day_index: np.ndarray | None = None
) -> ClusterResult:
    """Cluster one season and pick the member day closest to each centroid.

    ``day_index`` maps point rows to absolute day indices; weights are
    cluster sizes over the full 365-day year.
    """
    if day_index is None:
        day_index = np.arange(points.shape[0])
    labels, centroids, _ = kmeans(points, k, seed)
    sil = silhouette_score(points, labels) if k >= 2 else 0.0

    reps: list[tuple[int, float]] = []
    rep_rows = np.empty(k, dtype=int)
    for j in range(k):
        members = np.flatnonzero(labels == j)
        if len(members) == 0:
            raise AssertionError("k-means returned an empty cluster")
        d = np.linalg.norm(points[members] - centroids[j], axis=1)
        near = members[np.abs(d - d.min()) <= 1e-12]
        row = int(near[np.argmin(day_index[near])])  # distance tie: earliest day
        rep_rows[j] = row
        reps.append((int(day_index[row]), len(members) / DAYS))
    return ClusterResult(
        k=k,
        assignments=labels,
        centroids=centroids,
        silhouette=sil,
        rep_days=tuple(reps),
        rep_rows=rep_rows,
    )
