"""Seeded K-means (Lloyd) and spectral clustering with the eigen-gap heuristic.

kmeans initializes with k-means++ driven by an explicit 64-bit seed and stops
when no label changes (or max_iter). Spectral clustering embeds the affinity
matrix through its unnormalized Laplacian's lowest eigenvectors and K-means
clusters the embedded rows. All of it is single-threaded and deterministic
for fixed inputs and seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .tensor import FaceMatrix

__all__ = [
    "Clustering",
    "AffinityMatrix",
    "kmeans",
    "graph_laplacian",
    "eigen_gap_k",
    "spectral_cluster",
]


@dataclass(frozen=True)
class Clustering:
    """Integer labels over a point set. -1 marks masked-out points.

    inertia is the summed squared distance of points to their cluster means
    (None for spectral results, where the embedded-space value would be
    meaningless to callers). history holds the per-iteration objective when
    the caller asked kmeans to track it.
    """

    labels: np.ndarray
    k: int
    inertia: float | None = None
    history: tuple[float, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if self.k < 1:
            raise ValueError("k must be positive")
        if labels.size and labels.min() < -1:
            raise ValueError("labels must be >= -1")
        if labels.size and labels.max() >= self.k:
            raise ValueError("labels must be < k")
        present = np.unique(labels[labels >= 0])
        if present.size != self.k:
            raise ValueError(
                f"every cluster must be nonempty: {present.size} of {self.k} labels used"
            )
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)


@dataclass(frozen=True)
class AffinityMatrix:
    """Symmetric nonnegative weights with zero diagonal."""

    n: int
    w: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.w, dtype=np.float64)
        if w.shape != (self.n, self.n):
            raise ValueError(f"weights must be {self.n}x{self.n}, got {w.shape}")
        if not np.array_equal(w, w.T):
            raise ValueError("weights must be symmetric")
        if np.any(np.diagonal(w) != 0.0):
            raise ValueError("diagonal must be zero")
        if w.size and w.min() < 0.0:
            raise ValueError("weights must be nonnegative")
        w.flags.writeable = False
        object.__setattr__(self, "w", w)


def _as_points(points) -> np.ndarray:
    if isinstance(points, FaceMatrix):
        return points.as_array()
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    return x


def _kmeanspp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[int(rng.integers(n))]
    closest = ((x - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total > 0.0:
            r = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(closest), r, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = int(rng.integers(n))
        centers[j] = x[idx]
        closest = np.minimum(closest, ((x - centers[j]) ** 2).sum(axis=1))
    return centers


def _repair_empty(x, centers, counts):
    """Move each emptied centroid onto the point farthest from it."""
    taken: set[int] = set()
    for j in np.flatnonzero(counts == 0):
        d2 = ((x - centers[j]) ** 2).sum(axis=1)
        order = np.argsort(-d2, kind="stable")
        pick = next((int(i) for i in order if int(i) not in taken), int(order[0]))
        taken.add(pick)
        centers[j] = x[pick]


def kmeans(points, k: int, seed: int, max_iter: int = 300, track_history: bool = False) -> Clustering:
    """Lloyd's algorithm with seeded k-means++ initialization.

    Labels assign each row to its nearest centroid at termination; inertia is
    the summed squared distance to the final assignment's cluster means.
    Identical (points, k, seed, max_iter) give identical output.
    """
    x = _as_points(points)
    n = x.shape[0]
    if n == 0:
        raise ValueError("cannot cluster an empty point set")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed & (2**64 - 1)))
    centers = _kmeanspp_init(x, k, rng)

    history: list[float] = []
    prev = None
    labels = sums = counts = None
    for _ in range(max_iter):
        labels, sums, counts, sse = backend.lloyd_iter(x, centers)
        repairs = 0
        while np.any(counts == 0):
            if repairs >= k:
                raise ValueError("k exceeds the number of distinct points")
            _repair_empty(x, centers, counts)
            labels, sums, counts, sse = backend.lloyd_iter(x, centers)
            repairs += 1
        if track_history:
            history.append(sse)
        if prev is not None and np.array_equal(labels, prev):
            break
        prev = labels
        centers = sums / counts[:, None]

    means = sums / counts[:, None]
    diff = x - means[labels]
    inertia = float(np.einsum("nd,nd->", diff, diff))
    return Clustering(labels, k, inertia, tuple(history) if track_history else None)


def graph_laplacian(aff: AffinityMatrix) -> np.ndarray:
    """Unnormalized Laplacian L = D - W."""
    w = aff.w
    return np.diag(w.sum(axis=1)) - w


def eigen_gap_k(laplacian, k_min: int, k_max: int) -> int:
    """Cluster count with the largest eigenvalue jump.

    Returns the k in [k_min, k_max] maximizing eigenvalue(k+1) - eigenvalue(k)
    (ascending, 1-based); ties break toward the smaller k.
    """
    lap = np.asarray(laplacian, dtype=np.float64)
    n = lap.shape[0]
    if not 1 <= k_min <= k_max < n:
        raise ValueError(f"need 1 <= k_min <= k_max < n, got [{k_min}, {k_max}] with n={n}")
    evals = np.linalg.eigvalsh(lap)
    gaps = evals[k_min : k_max + 1] - evals[k_min - 1 : k_max]
    return k_min + int(np.argmax(gaps))


def spectral_cluster(aff: AffinityMatrix, k: int, seed: int, max_iter: int = 300) -> Clustering:
    """K-means over the rows of the k lowest-eigenvalue Laplacian eigenvectors."""
    if not 1 <= k <= aff.n:
        raise ValueError(f"k must be in [1, {aff.n}], got {k}")
    lap = graph_laplacian(aff)
    _, vecs = np.linalg.eigh(lap)
    embedded = np.ascontiguousarray(vecs[:, :k])
    km = kmeans(embedded, k, seed, max_iter)
    return Clustering(km.labels, k, None)
