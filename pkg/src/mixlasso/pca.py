"""Principal component analysis via eigendecomposition of the sample covariance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidK, RankDeficient


@dataclass(frozen=True)
class PcaModel:
    """Fitted principal axes.

    Attributes
    ----------
    mean : ndarray, shape (p,)
    components : ndarray, shape (k, p)
        Unit-norm principal axes, one per row, by descending eigenvalue. Each
        axis is signed so that its largest-magnitude loading is positive.
    eigenvalues : ndarray, shape (k,)
        Variances (divisor ``n - 1``) along each axis.
    total_variance : float
        Trace of the sample covariance.
    """

    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray
    total_variance: float

    @property
    def k(self) -> int:
        return self.components.shape[0]

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        return self.eigenvalues / self.total_variance


def _orient(vecs):
    # Columns of `vecs` are axes; flip so the largest |entry| is positive.
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def fit_pca(X, k: int) -> PcaModel:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch("X must be a 2-D matrix")
    n, p = X.shape
    if n < 2:
        raise InvalidK("PCA needs at least two rows")
    if not (1 <= k <= min(n - 1, p)):
        raise InvalidK(f"k must satisfy 1 <= k <= min(n-1, p) = {min(n - 1, p)}, got {k}")

    mean = X.mean(axis=0)
    Xc = X - mean
    cov = Xc.T @ Xc / (n - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    evecs = _orient(evecs[:, order])
    total = float(np.trace(cov))

    if total <= 0.0 or evals[k - 1] < 1e-12 * total:
        raise RankDeficient(f"requested {k} components but the data has lower numerical rank")
    return PcaModel(
        mean=mean,
        components=np.ascontiguousarray(evecs[:, :k].T),
        eigenvalues=evals[:k],
        total_variance=total,
    )


def project(m: PcaModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != m.mean.shape[0]:
        raise DimensionMismatch(f"expected {m.mean.shape[0]} columns, got shape {X.shape}")
    return (X - m.mean) @ m.components.T


def reconstruct(m: PcaModel, scores) -> np.ndarray:
    return np.asarray(scores, dtype=float) @ m.components + m.mean
