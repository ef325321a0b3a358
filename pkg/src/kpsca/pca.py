"""PCA on standardized observation matrices, with first-component labeling.

The covariance of a column-standardized matrix is its correlation matrix;
its eigendecomposition is computed with cyclic Jacobi rotations. For wide
matrices (more features than ``DUAL_THRESHOLD``) the spectrum is obtained
from the l x l Gram matrix instead and eigenvectors are mapped back, which
keeps the uncompressed-trace layout (tens of thousands of columns) tractable.

Eigenvectors are sign-normalized so that their largest-magnitude entry is
positive, making downstream class labels deterministic.
"""

from dataclasses import dataclass

import numpy as np

from ._backend import jacobi_eigh
from .obsmatrix import StandardizedMatrix

DUAL_THRESHOLD = 1024
_RANK_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class PcaModel:
    """Eigenvalues (non-increasing) and unit eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # (d, m), one column per retained component
    effective_dim: int
    method: str  # "direct" or "dual"
    sweep_off_norms: np.ndarray

    @property
    def n_components(self) -> int:
        return int(self.eigenvalues.size)


def _as_std(m) -> tuple[np.ndarray, int]:
    if isinstance(m, StandardizedMatrix):
        return m.data, m.effective_dim
    data = np.ascontiguousarray(m, dtype=np.float64)
    nonconst = int(np.count_nonzero(np.any(data != data[0], axis=0)))
    return data, nonconst


def covariance_matrix(m) -> np.ndarray:
    """Population covariance of a standardized matrix (= correlation matrix)."""
    data, _ = _as_std(m)
    sigma = data.T @ data / data.shape[0]
    return (sigma + sigma.T) / 2.0


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-|entry| component is positive."""
    if vectors.size == 0:
        return vectors
    idx = np.abs(vectors).argmax(axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigendecompose(sigma: np.ndarray, symmetry_tol: float = 1e-9) -> PcaModel:
    """Full eigendecomposition of a symmetric matrix via cyclic Jacobi.

    Eigenpairs come back sorted by non-increasing eigenvalue, eigenvectors
    sign-normalized. Raises ValueError when the input is not symmetric.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ValueError("expected a square matrix")
    if sigma.size and np.max(np.abs(sigma - sigma.T)) > symmetry_tol:
        raise ValueError("matrix is not symmetric")
    w, v, off_history = jacobi_eigh(sigma)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = _fix_signs(v[:, order])
    return PcaModel(w, v, sigma.shape[0], "direct", off_history)


def pca_fit(m, max_components: int | None = None) -> PcaModel:
    """Fit PCA to a standardized matrix.

    Narrow matrices go through the d x d correlation matrix directly; wide
    ones through the Gram matrix (both give the same nonzero spectrum).
    Retains min(l, effective_dim) components on the direct path and the
    numerically nonzero ones on the dual path, capped at ``max_components``.
    """
    data, effective_dim = _as_std(m)
    l, d = data.shape
    if d <= DUAL_THRESHOLD:
        sigma = data.T @ data / l
        sigma = (sigma + sigma.T) / 2.0
        w, v, off_history = jacobi_eigh(sigma)
        order = np.argsort(-w, kind="stable")
        keep = min(l, effective_dim)
        order = order[:keep]
        w = np.maximum(w[order], 0.0)
        v = _fix_signs(v[:, order])
        method = "direct"
    else:
        gram = data @ data.T / l
        gram = (gram + gram.T) / 2.0
        w_all, u, off_history = jacobi_eigh(gram)
        order = np.argsort(-w_all, kind="stable")
        order = np.array([i for i in order if w_all[i] > _RANK_EPS], dtype=np.intp)
        w = w_all[order]
        v = data.T @ u[:, order]
        norms = np.linalg.norm(v, axis=0)
        norms[norms == 0] = 1.0
        v = _fix_signs(v / norms)
        method = "dual"
    if max_components is not None:
        w = w[:max_components]
        v = v[:, :max_components]
    return PcaModel(w, v, effective_dim, method, off_history)


def project(m, model: PcaModel, components: int) -> np.ndarray:
    """Scores of the observations on the first ``components`` eigenvectors."""
    data, _ = _as_std(m)
    if not 0 <= components <= model.n_components:
        raise ValueError(
            f"components={components} out of range 0..{model.n_components}"
        )
    return data @ model.eigenvectors[:, :components]


def classify_pc1(scores: np.ndarray) -> np.ndarray:
    """Binary labels from the sign of the first score column (0 at zero)."""
    scores = np.asarray(scores)
    if scores.ndim != 2 or scores.shape[1] < 1:
        raise ValueError("scores must have at least one component column")
    return (scores[:, 0] > 0).astype(np.uint8)
