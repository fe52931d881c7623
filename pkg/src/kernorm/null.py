"""The Gaussian null N(0, Sigma) on the kernel feature space.

A null is described by the spectrum of its covariance operator plus an
evaluator of the covariance function on raw points.  Only the spectrum
enters the null simulation; the evaluator is needed for the statistic's
``Sigma(X_i, X_i)`` term.
"""

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, InputError
from .linalg import as_points, as_symmetric, center_gram, kernel_matrix, psd_floor, sym_eigendecompose

__all__ = [
    "Origin",
    "CovarianceSpec",
    "NullModel",
    "DEFAULT_RESCALE_TARGET",
    "diagonal_covariance",
    "zero_covariance",
    "covariance_matrix",
    "covariance_diag",
    "null_norm_sq",
    "rescale",
    "null_model",
    "estimate_null_from_sample",
]

DEFAULT_RESCALE_TARGET = 0.9


class Origin(enum.Enum):
    PARAMETRIC = "parametric"
    EMPIRICAL = "empirical"


@dataclass(frozen=True)
class CovarianceSpec:
    """Covariance of the Gaussian null.

    ``cov_fn(X, Y)`` returns the matrix ``[Sigma(X_i, Y_j)]`` for two point
    arrays; ``diag_fn(X)``, when given, returns ``[Sigma(X_i, X_i)]`` without
    forming the full matrix.
    """

    eigenvalues: np.ndarray
    cov_fn: Callable = field(repr=False)
    origin: Origin = Origin.PARAMETRIC
    diag_fn: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.eigenvalues, dtype=float)).ravel()
        if lam.size and (np.any(lam < 0) or not np.all(np.isfinite(lam))):
            raise InputError("covariance eigenvalues must be finite and nonnegative")
        if np.any(np.diff(lam) > 0):
            raise InputError("covariance eigenvalues must be nonincreasing")
        lam.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)

    @property
    def top(self):
        return float(self.eigenvalues[0]) if self.eigenvalues.size else 0.0

    def evaluate(self, x, y):
        return float(np.asarray(self.cov_fn(as_points(np.atleast_1d(x)[None, :]),
                                            as_points(np.atleast_1d(y)[None, :])))[0, 0])


@dataclass(frozen=True)
class NullModel:
    """A covariance together with its rescale factor and embedding norm b^2."""

    cov: CovarianceSpec
    b_sq: float
    gamma: float = 1.0

    @property
    def eigenvalues(self):
        return self.gamma * self.cov.eigenvalues


def diagonal_covariance(variances):
    """Parametric null for the linear kernel on R^d with ``Sigma = diag(variances)``."""
    v = np.asarray(variances, dtype=float).ravel()
    if v.size < 1 or np.any(v < 0):
        raise InputError("variances must be a nonempty nonnegative vector")

    def cov_fn(X, Y):
        X, Y = as_points(X), as_points(Y)
        if X.shape[1] != v.size or Y.shape[1] != v.size:
            raise InputError(f"null covariance is {v.size}-dimensional, points are {X.shape[1]}-dimensional")
        return (X * v) @ Y.T

    def diag_fn(X):
        X = as_points(X)
        if X.shape[1] != v.size:
            raise InputError(f"null covariance is {v.size}-dimensional, points are {X.shape[1]}-dimensional")
        return (X * X) @ v

    return CovarianceSpec(np.sort(v)[::-1], cov_fn, Origin.PARAMETRIC, diag_fn)


def zero_covariance():
    def cov_fn(X, Y):
        return np.zeros((len(as_points(X)), len(as_points(Y))))

    return CovarianceSpec(np.zeros(0), cov_fn, Origin.PARAMETRIC, lambda X: np.zeros(len(as_points(X))))


def covariance_matrix(cov, points):
    X = as_points(points)
    try:
        C = np.asarray(cov.cov_fn(X, X), dtype=float)
    except InputError:
        raise
    except Exception as exc:
        raise InputError(f"covariance evaluator failed: {exc}") from exc
    if C.shape != (len(X), len(X)) or not np.all(np.isfinite(C)):
        raise InputError("covariance evaluator returned a malformed matrix")
    return as_symmetric(C)


def covariance_diag(cov, points):
    """``[Sigma(X_i, X_i)]``; uses the diagonal evaluator when available."""
    X = as_points(points)
    if cov.diag_fn is None:
        return np.diag(covariance_matrix(cov, X)).copy()
    try:
        c = np.asarray(cov.diag_fn(X), dtype=float).ravel()
    except InputError:
        raise
    except Exception as exc:
        raise InputError(f"covariance evaluator failed: {exc}") from exc
    if c.shape != (len(X),):
        raise InputError("covariance diagonal evaluator returned a malformed vector")
    return c


def null_norm_sq(eigenvalues):
    """``b^2 = prod_r (1 - lambda_r^2)^(-1/2)``, the squared norm of the null embedding."""
    lam = np.asarray(eigenvalues, dtype=float).ravel()
    if lam.size == 0:
        return 1.0
    if np.any(lam < 0) or np.any(lam >= 1):
        raise DomainError(
            f"null covariance eigenvalues must lie in [0, 1), largest is {lam.max():.6g}; rescale first"
        )
    return float(np.exp(-0.5 * np.sum(np.log1p(-lam * lam))))


def rescale(K, C, eigenvalues, target=DEFAULT_RESCALE_TARGET):
    """Scale data and null so the top null eigenvalue equals ``target``.

    Returns ``(gamma, gamma*K, gamma**2*C, gamma*eigenvalues)``.  A null
    with zero spectrum is returned unchanged with ``gamma = 1``.
    """
    if not 0 < target < 1:
        raise InputError(f"rescale target must lie in (0, 1), got {target}")
    lam = np.asarray(eigenvalues, dtype=float)
    top = float(lam.max()) if lam.size else 0.0
    if top <= 0:
        return 1.0, K, C, lam
    gamma = target / top
    if gamma == 1.0:
        return 1.0, K, C, lam
    K = None if K is None else gamma * np.asarray(K, dtype=float)
    C = None if C is None else (gamma * gamma) * np.asarray(C, dtype=float)
    return gamma, K, C, gamma * lam


def null_model(cov, target=DEFAULT_RESCALE_TARGET):
    """Build the :class:`NullModel`, rescaling only when ``lambda_1 >= 1``."""
    gamma = 1.0
    if cov.top >= 1:
        gamma = rescale(None, None, cov.eigenvalues, target)[0]
    return NullModel(cov, null_norm_sq(gamma * cov.eigenvalues), gamma)


def estimate_null_from_sample(K, kernel=None, sample=None):
    """Empirical null: spectrum of the centered Gram matrix divided by n.

    The covariance evaluator acts on points recentered in feature space
    (doubly centered cross-kernel), matching how the statistic treats the
    data under an empirical null.  It needs ``kernel`` and ``sample``; on the
    sample itself ``Sigma(X_i, X_j) = (Kc @ Kc)_{ij} / n``.
    """
    K = as_symmetric(K)
    n = K.shape[0]
    if n < 2:
        raise InputError("empirical null needs at least two observations")
    Kc = center_gram(K)
    w, _ = sym_eigendecompose(Kc)
    lam = np.sort(psd_floor(w, scale=n * max(np.abs(Kc).max(), 1e-300)) / n)[::-1]
    col_mean = K.mean(axis=0)
    grand = col_mean.mean()

    def centered_cross(X):
        if kernel is None or sample is None:
            raise InputError("evaluating an empirical covariance off-sample needs the kernel and the sample")
        kx = kernel_matrix(kernel, X, sample)
        return kx - kx.mean(axis=1, keepdims=True) - col_mean[None, :] + grand

    def cov_fn(X, Y):
        return centered_cross(X) @ centered_cross(Y).T / n

    def diag_fn(X):
        kx = centered_cross(X)
        return np.einsum("ij,ij->i", kx, kx) / n

    return CovarianceSpec(lam, cov_fn, Origin.EMPIRICAL, diag_fn)
