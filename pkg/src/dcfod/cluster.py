"""Centroid initialization: seeded k-means++ with Lloyd iterations, plus a
mini-batch variant for large datasets.

Both routines are deterministic functions of (points, seed). Ties between
equidistant centroids break toward the lowest centroid index, and a centroid
that loses all members is reseeded to the point farthest from its nearest
centroid so every cluster stays non-empty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Array = np.ndarray


@dataclass
class KmeansResult:
    centroids: Array          # (K, D)
    assignments: Array        # (N,) int
    inertia: float
    n_iters: int


def _squared_distances(points: Array, centroids: Array) -> Array:
    """Pairwise squared euclidean distances, (N, K), clipped at zero."""
    sq = (
        np.sum(points * points, axis=1)[:, None]
        - 2.0 * points @ centroids.T
        + np.sum(centroids * centroids, axis=1)[None, :]
    )
    return np.maximum(sq, 0.0)


def _plusplus_seed(points: Array, k: int, rng: np.random.Generator) -> Array:
    """k-means++ seeding: first center uniform, then proportional to the
    squared distance to the nearest center chosen so far."""
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = points[first]
    closest = _squared_distances(points, centroids[:1]).ravel()
    for i in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            # all remaining mass at distance zero: duplicate points
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=closest / total))
        centroids[i] = points[idx]
        new_d = _squared_distances(points, centroids[i : i + 1]).ravel()
        np.minimum(closest, new_d, out=closest)
    return centroids


def _repair_empty(points: Array, centroids: Array, assignments: Array) -> Array:
    """Reseed empty clusters to the point farthest from its nearest centroid."""
    k = centroids.shape[0]
    for attempt in range(k):
        counts = np.bincount(assignments, minlength=k)
        empty = np.flatnonzero(counts == 0)
        if empty.size == 0:
            return assignments
        nearest = _squared_distances(points, centroids).min(axis=1)
        for e in empty:
            far = int(np.argmax(nearest))
            centroids[e] = points[far]
            nearest[far] = 0.0
        assignments = np.argmin(_squared_distances(points, centroids), axis=1)
    return assignments


def kmeans(points: Array, k: int, seed: int, max_iters: int = 300) -> KmeansResult:
    """Lloyd's algorithm from k-means++ seeding until the assignment fixpoint.

    Inertia (sum of squared distances to the assigned centroid) is checked to
    be non-increasing across iterations; a violation beyond float tolerance
    indicates a bug and raises.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if k < 1:
        raise ValueError("k must be at least 1")
    if n < k:
        raise ValueError(f"need at least k={k} points, got {n}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    centroids = _plusplus_seed(points, k, rng)
    assignments = np.argmin(_squared_distances(points, centroids), axis=1)
    assignments = _repair_empty(points, centroids, assignments)
    prev_inertia = np.inf
    n_iters = 0
    for n_iters in range(1, max_iters + 1):
        # update step: per-cluster means
        for c in range(k):
            members = assignments == c
            if members.any():
                centroids[c] = points[members].mean(axis=0)
        sq = _squared_distances(points, centroids)
        new_assignments = np.argmin(sq, axis=1)
        new_assignments = _repair_empty(points, centroids, new_assignments)
        inertia = float(
            _squared_distances(points, centroids)[
                np.arange(n), new_assignments
            ].sum()
        )
        if inertia > prev_inertia + 1e-9 * max(1.0, prev_inertia):
            raise AssertionError(
                f"k-means inertia increased: {prev_inertia} -> {inertia}"
            )
        converged = np.array_equal(new_assignments, assignments)
        assignments = new_assignments
        prev_inertia = inertia
        if converged:
            break
    return KmeansResult(
        centroids=centroids,
        assignments=assignments,
        inertia=prev_inertia,
        n_iters=n_iters,
    )


def minibatch_kmeans(
    points: Array,
    k: int,
    seed: int,
    batch_size: int = 1024,
    iters: int = 100,
) -> KmeansResult:
    """Mini-batch k-means with cumulative per-centroid counts.

    Each iteration samples a batch, assigns it against the current centroids,
    and moves every centroid toward its batch mean with step size
    n_batch / (count + n_batch). With batch_size >= N the first iteration is
    exactly one Lloyd pass; later iterations are increasingly damped.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if n < k:
        raise ValueError(f"need at least k={k} points, got {n}")
    if batch_size < 1:
        raise ValueError("batch_size must be positive")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    centroids = _plusplus_seed(points, k, rng)
    counts = np.zeros(k)
    take = min(batch_size, n)
    for _ in range(iters):
        batch = points[rng.choice(n, size=take, replace=False)] if take < n else points
        assign = np.argmin(_squared_distances(batch, centroids), axis=1)
        for c in range(k):
            members = assign == c
            m = members.sum()
            if m == 0:
                continue
            step = m / (counts[c] + m)
            centroids[c] += step * (batch[members].mean(axis=0) - centroids[c])
            counts[c] += m
    assignments = np.argmin(_squared_distances(points, centroids), axis=1)
    assignments = _repair_empty(points, centroids, assignments)
    inertia = float(
        _squared_distances(points, centroids)[np.arange(n), assignments].sum()
    )
    return KmeansResult(
        centroids=centroids, assignments=assignments, inertia=inertia, n_iters=iters
    )
