"""Pure-NumPy implementations of the numeric kernels.

Mirrors the compiled extension in ``_kernels.pyx``; the active backend is
chosen in ``_backend``. Summations that feed exactness tests (row sums of
squares) go through ``cumsum`` so the accumulation order matches a plain
sequential loop.
"""

import numpy as np

BACKEND_NAME = "python"


def sum_squares_rows(x):
    """Sequential per-row sum of squares of a C-contiguous (n, s) array."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape[1] == 0:
        return np.zeros(x.shape[0])
    return np.cumsum(x * x, axis=1)[:, -1].copy()


def _assign(x, centroids):
    # squared distances; ties resolve to the lowest centroid index
    d2 = np.empty((centroids.shape[0], x.shape[0]))
    for r in range(centroids.shape[0]):
        diff = x - centroids[r]
        d2[r] = np.einsum("ij,ij->i", diff, diff)
    labels = d2.argmin(axis=0)
    return labels, d2[labels, np.arange(x.shape[0])]


def _update(x, labels, assigned_d2, k):
    n, d = x.shape
    centroids = np.zeros((k, d))
    counts = np.bincount(labels, minlength=k)
    for r in range(k):
        if counts[r] > 0:
            centroids[r] = x[labels == r].mean(axis=0)
    empties = np.flatnonzero(counts == 0)
    if empties.size:
        # reseed each empty centroid with the farthest unused row
        taken = set()
        for r in empties:
            best, best_d2 = -1, -1.0
            for j in range(n):
                if j not in taken and assigned_d2[j] > best_d2:
                    best, best_d2 = j, assigned_d2[j]
            centroids[r] = x[best]
            taken.add(best)
    return centroids


def lloyd(x, init_idx, max_iter):
    """One K-means run from the given initial rows.

    Returns (labels, centroids, inertia, converged, iterations, history)
    where history[m] is the inertia after the m-th centroid update.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    k = len(init_idx)
    centroids = x[np.asarray(init_idx, dtype=np.intp)].copy()
    prev = None
    history = []
    converged = False
    iterations = 0
    labels = np.zeros(x.shape[0], dtype=np.int64)
    for _ in range(max_iter):
        iterations += 1
        labels, assigned_d2 = _assign(x, centroids)
        if prev is not None and np.array_equal(labels, prev):
            converged = True
            break
        prev = labels
        centroids = _update(x, labels, assigned_d2, k)
        diff = x - centroids[labels]
        history.append(float(np.einsum("ij,ij->", diff, diff)))
    inertia = history[-1]
    return (
        labels.astype(np.int64),
        centroids,
        inertia,
        converged,
        iterations,
        np.asarray(history),
    )


def _off_norm(a):
    off2 = float(np.sum(a * a) - np.sum(np.diag(a) ** 2))
    return np.sqrt(max(off2, 0.0))


def jacobi_eigh(a, tol_factor=1e-10, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps rotate every (p, q) pair in row order until the off-diagonal
    Frobenius norm falls below ``tol_factor`` times the input norm.
    Returns (diagonal, eigenvector columns, off-norm after each sweep).
    """
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    thresh = tol_factor * float(np.linalg.norm(a))
    history = []
    sweeps = 0
    while _off_norm(a) > thresh:
        if sweeps >= max_sweeps:
            raise RuntimeError("Jacobi sweep limit reached without convergence")
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (tau - np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                newp = c * colp - s * colq
                newq = s * colp + c * colq
                a[:, p] = newp
                a[p, :] = newp
                a[:, q] = newq
                a[q, :] = newq
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vcolp = v[:, p].copy()
                vcolq = v[:, q].copy()
                v[:, p] = c * vcolp - s * vcolq
                v[:, q] = s * vcolp + c * vcolq
        sweeps += 1
        history.append(_off_norm(a))
    return np.diag(a).copy(), v, np.asarray(history)
