"""Kernels, Gram matrices, double centering and symmetric eigendecomposition.

Symmetric matrices are plain ``numpy`` arrays; :func:`as_symmetric` is the
single entry point that validates them and enforces exact symmetry.
"""

import enum
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from .errors import InputError, NumericError

__all__ = [
    "KernelKind",
    "KernelSpec",
    "as_points",
    "as_symmetric",
    "eval_kernel",
    "kernel_matrix",
    "gram_matrix",
    "center_gram",
    "sym_eigendecompose",
    "psd_floor",
    "kernel_features",
]


class KernelKind(enum.Enum):
    LINEAR = "linear"
    GAUSSIAN_RBF = "gaussian"


@dataclass(frozen=True)
class KernelSpec:
    """A positive definite kernel on real vectors.

    ``sigma_sq`` is the inverse-bandwidth of the Gaussian kernel
    ``exp(-sigma_sq * ||x - y||**2)`` and is ignored for the linear kernel.
    """

    kind: KernelKind = KernelKind.LINEAR
    sigma_sq: float = 1.0

    def __post_init__(self):
        kind = self.kind
        if isinstance(kind, str):
            try:
                kind = KernelKind(kind.lower())
            except ValueError:
                raise InputError(f"unknown kernel kind {self.kind!r}") from None
            object.__setattr__(self, "kind", kind)
        if kind is KernelKind.GAUSSIAN_RBF and not self.sigma_sq > 0:
            raise InputError(f"Gaussian kernel requires sigma_sq > 0, got {self.sigma_sq}")

    @classmethod
    def linear(cls):
        return cls(KernelKind.LINEAR)

    @classmethod
    def gaussian(cls, sigma_sq):
        return cls(KernelKind.GAUSSIAN_RBF, float(sigma_sq))


def as_points(points, min_rows=1):
    """Coerce ``points`` to a finite 2-D float array (rows are observations)."""
    try:
        X = np.asarray(points, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"points must be a rectangular numeric array: {exc}") from None
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[1] < 1:
        raise InputError(f"points must be 2-D with at least one column, got shape {X.shape}")
    if X.shape[0] < min_rows:
        raise InputError(f"need at least {min_rows} points, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise InputError("points contain non-finite values")
    return X


def as_symmetric(K):
    """Validate a square matrix and return an exactly symmetric copy."""
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] < 1:
        raise InputError(f"expected a square matrix, got shape {K.shape}")
    return 0.5 * (K + K.T)


def eval_kernel(spec, x, y):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.ndim != 1 or x.shape != y.shape or x.size < 1:
        raise InputError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if spec.kind is KernelKind.LINEAR:
        return float(x @ y)
    diff = x - y
    return float(np.exp(-spec.sigma_sq * (diff @ diff)))


def kernel_matrix(spec, X, Y):
    """Cross-kernel matrix ``[k(X_i, Y_j)]`` between two point sets."""
    X = as_points(X)
    Y = as_points(Y)
    if X.shape[1] != Y.shape[1]:
        raise InputError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    if spec.kind is KernelKind.LINEAR:
        return X @ Y.T
    return np.exp(-spec.sigma_sq * cdist(X, Y, "sqeuclidean"))


def gram_matrix(spec, points):
    X = as_points(points, min_rows=2)
    if spec.kind is KernelKind.LINEAR:
        return as_symmetric(X @ X.T)
    K = np.exp(-spec.sigma_sq * squareform(pdist(X, "sqeuclidean")))
    np.fill_diagonal(K, 1.0)
    return K


def center_gram(K):
    """Return ``H K H`` with ``H = I - 11'/n``."""
    K = as_symmetric(K)
    row = K.mean(axis=1)
    Kc = K - row[:, None] - row[None, :] + row.mean()
    return 0.5 * (Kc + Kc.T)


def sym_eigendecompose(K):
    """Eigenvalues (nonincreasing) and orthonormal eigenvectors (columns)."""
    K = as_symmetric(K)
    try:
        w, V = np.linalg.eigh(K)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"symmetric eigensolver did not converge: {exc}") from exc
    return w[::-1].copy(), V[:, ::-1].copy()


def psd_floor(eigenvalues, scale=None):
    """Clamp eigenvalues that are negative within round-off to zero.

    ``scale`` defaults to ``n * max|lambda|``; values below ``-1e-8 * scale``
    are genuine negative eigenvalues and raise.
    """
    w = np.asarray(eigenvalues, dtype=float)
    if scale is None:
        scale = w.size * (np.abs(w).max() if w.size else 0.0)
    if w.size and w.min() < -1e-8 * max(scale, 1e-300):
        raise NumericError(f"matrix is not positive semidefinite (eigenvalue {w.min():.3g})")
    return np.clip(w, 0.0, None)


def kernel_features(K, rtol=1e-12):
    """Feature coordinates ``Phi`` with ``Phi @ Phi.T == K`` (kernel PCA scores).

    Directions with eigenvalue below ``rtol * lambda_max`` are dropped.
    """
    w, V = sym_eigendecompose(K)
    w = psd_floor(w)
    keep = w > rtol * (w[0] if w.size else 0.0)
    if not np.any(keep):
        return np.zeros((K.shape[0], 1))
    return V[:, keep] * np.sqrt(w[keep])
