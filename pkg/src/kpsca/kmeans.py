"""Lloyd's K-means with random-observation initialization and restarts.

Each run starts from K distinct rows drawn uniformly without replacement
(PCG64, seeded), assigns rows to the nearest centroid by Euclidean distance
(ties to the lowest centroid index), recomputes centroids as cluster means,
and stops when the assignment repeats or the iteration cap is hit. A restart
sweep reruns with seeds ``base_seed + r`` and keeps the converged run with
the smallest inertia (falling back to the overall minimum if none converged;
ties go to the lowest restart index).

Empty clusters are reseeded with the row farthest from its assigned centroid,
which keeps the inertia sequence non-increasing.
"""

from dataclasses import dataclass

import numpy as np

from ._backend import lloyd
from .obsmatrix import StandardizedMatrix


@dataclass(frozen=True)
class KMeansConfig:
    K: int = 2
    max_iter: int = 300
    restarts: int = 10
    base_seed: int = 0

    def __post_init__(self):
        if self.K < 1 or self.max_iter < 1 or self.restarts < 1:
            raise ValueError("K, max_iter and restarts must all be >= 1")


@dataclass(frozen=True, eq=False)
class Clustering:
    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    converged: bool
    iterations_used: int
    inertia_history: np.ndarray
    seed: int


def _as_array(m) -> np.ndarray:
    if isinstance(m, StandardizedMatrix):
        return m.data
    return np.ascontiguousarray(m, dtype=np.float64)


def kmeans_single(m, K: int, max_iter: int, seed: int) -> Clustering:
    """One seeded K-means run."""
    x = _as_array(m)
    if K < 1 or max_iter < 1:
        raise ValueError("K and max_iter must be >= 1")
    if x.shape[0] < K:
        raise ValueError(f"need at least K={K} rows, got {x.shape[0]}")
    rng = np.random.Generator(np.random.PCG64(seed))
    init_idx = rng.choice(x.shape[0], size=K, replace=False).astype(np.int64)
    labels, centroids, inertia, converged, iterations, history = lloyd(
        x, init_idx, max_iter
    )
    return Clustering(labels, centroids, inertia, converged, iterations, history, seed)


def kmeans_restarted(m, cfg: KMeansConfig) -> Clustering:
    """Restart sweep with seeds base_seed..base_seed+restarts-1."""
    x = _as_array(m)
    best = None
    for r in range(cfg.restarts):
        run = kmeans_single(x, cfg.K, cfg.max_iter, cfg.base_seed + r)
        if best is None:
            best = run
        elif run.converged and not best.converged:
            best = run
        elif run.converged == best.converged and run.inertia < best.inertia:
            best = run
    return best
