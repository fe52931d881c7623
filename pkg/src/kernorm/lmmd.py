"""The L-MMD normality test.

The statistic compares the sample's embedding under the exponential kernel
``exp(k(., .))`` with the embedding of the Gaussian null.  Its finite-sample
null law is simulated from the null covariance spectrum alone, and the
rejection threshold is an order statistic of ``B`` simulated replicates.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from ._seeding import default_workers, make_rng
from .errors import ConfigurationError, DomainError, InputError, KernormError, NumericError
from .linalg import KernelSpec, as_points, center_gram, gram_matrix
from .null import (
    DEFAULT_RESCALE_TARGET,
    Origin,
    covariance_diag,
    estimate_null_from_sample,
    null_model,
)

__all__ = [
    "EXP_GUARD",
    "Elapsed",
    "TestResult",
    "Type2BoundInputs",
    "lmmd_statistic",
    "order_index",
    "order_statistic_threshold",
    "simulate_null_statistic",
    "null_replicates",
    "trim_spectrum",
    "estimate_quantile",
    "statistic_inputs",
    "run_test",
    "type1_bounds",
    "type2_bound",
]

# exp() overflows double precision just above 709.
EXP_GUARD = 700.0
_ALPHA_TOL = 1e-9


@dataclass(frozen=True)
class Elapsed:
    statistic: float = 0.0
    quantile: float = 0.0

    @property
    def total(self):
        return self.statistic + self.quantile


@dataclass(frozen=True)
class TestResult:
    statistic: float
    threshold: float
    alpha: float
    B: int
    reject: bool
    seed: int
    elapsed: Elapsed = field(default_factory=Elapsed, compare=False)
    gamma: float = 1.0
    b_sq: float = 1.0


@dataclass(frozen=True)
class Type2BoundInputs:
    """Quantities entering the Type-II error bound.

    L is the embedding gap between the alternative and the null, M an almost
    sure bound on the feature norm, m2 the alternative's embedding variance
    and q the null (1 - alpha)-quantile of the statistic.
    """

    L: float
    M: float
    m2: float
    q: float
    alpha: float
    B: int
    n: int
    c_p0: float = 1.0

    @property
    def min_n(self):
        """Sample sizes must exceed this value for the bound to apply."""
        return (self.q + self.m2) / self.L ** 2

    @property
    def applicable(self):
        return self.n > self.min_n


def _exp_sum_offdiag(A):
    """Sum of ``exp(A_ij)`` over ``i != j``; overwrites ``A``."""
    np.fill_diagonal(A, -np.inf)
    top = A.max()
    if top > EXP_GUARD:
        raise NumericError(
            f"kernel value {top:.4g} exceeds the exp guard {EXP_GUARD:g}; rescale the data and null"
        )
    np.exp(A, out=A)
    return A.sum()


def _combine(exp_offdiag_sum, half_quad, b_sq, n):
    if half_quad.size and half_quad.max() > EXP_GUARD:
        raise NumericError(
            f"covariance term {half_quad.max():.4g} exceeds the exp guard {EXP_GUARD:g}; rescale the data and null"
        )
    return float(exp_offdiag_sum / (n - 1) - 2.0 * np.exp(half_quad).sum() + n * b_sq)


def lmmd_statistic(K, C_diag, b_sq):
    """The unbiased statistic ``n * L_hat^2`` from a Gram matrix and the null covariance diagonal.

    ``1/(n-1) sum_{i!=j} exp(K_ij) - 2 sum_i exp(C_ii / 2) + n b^2``
    """
    A = np.array(K, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 2:
        raise InputError(f"K must be square with n >= 2, got shape {A.shape}")
    n = A.shape[0]
    c = np.asarray(C_diag, dtype=float).ravel()
    if c.size != n:
        raise InputError(f"C_diag has length {c.size}, expected {n}")
    if not b_sq >= 1 - 1e-12:
        raise DomainError(f"b_sq must be >= 1, got {b_sq}")
    return _combine(_exp_sum_offdiag(A), 0.5 * c, b_sq, n)


def order_index(alpha, B):
    """Rank of the replicate used as threshold: ``floor(B + 2 - alpha (B + 1))`` clamped to [1, B]."""
    if not 0 < alpha < 1:
        raise ConfigurationError(f"alpha must lie in (0, 1), got {alpha}")
    if int(B) != B or B < 1:
        raise ConfigurationError(f"B must be a positive integer, got {B}")
    B = int(B)
    if alpha * (B + 1) < 1 - _ALPHA_TOL:
        min_B = math.ceil(1 / alpha - _ALPHA_TOL) - 1
        raise ConfigurationError(f"alpha={alpha} needs B >= {min_B} Monte-Carlo replicates, got B={B}")
    ell = math.floor(B + 2 - alpha * (B + 1) + _ALPHA_TOL)
    return min(max(ell, 1), B)


def order_statistic_threshold(replicates, alpha):
    """The ``order_index``-th smallest replicate (stable sort)."""
    values = np.sort(np.asarray(replicates, dtype=float).ravel(), kind="stable")
    return float(values[order_index(alpha, values.size) - 1])


def simulate_null_statistic(eigenvalues, n, b_sq, rng, normals=None):
    """One draw of the statistic under the null, from the covariance spectrum.

    With ``G`` an ``n x d`` matrix of standard normals, ``<Z_i, Z_j> =
    sum_r lambda_r G_ir G_jr`` and ``<Z_i, Sigma Z_i> = sum_r lambda_r^2 G_ir^2``.
    ``normals`` overrides the draw (used to inject fixed values).
    """
    lam = np.asarray(eigenvalues, dtype=float).ravel()
    if n < 2:
        raise InputError(f"n must be >= 2, got {n}")
    if lam.size and (lam.min() < 0 or lam.max() >= 1):
        raise DomainError("null eigenvalues must lie in [0, 1); rescale first")
    if normals is None:
        G = rng.standard_normal((n, lam.size))
    else:
        G = np.asarray(normals, dtype=float).reshape(n, lam.size)
    scaled = G * lam
    A = scaled @ G.T
    half_quad = 0.5 * np.einsum("ij,ij->i", scaled, scaled)
    return _combine(_exp_sum_offdiag(A), half_quad, b_sq, n)


def trim_spectrum(eigenvalues, rtol=1e-12):
    lam = np.asarray(eigenvalues, dtype=float).ravel()
    if lam.size == 0 or lam.max() <= 0:
        return lam[:0]
    return lam[lam > rtol * lam.max()]


def null_replicates(eigenvalues, n, b_sq, B, seed, workers=1):
    """``B`` independent null draws; replicate ``b`` uses the child stream ``(seed, b)``."""
    lam = trim_spectrum(eigenvalues)

    def one(b):
        return simulate_null_statistic(lam, n, b_sq, make_rng(seed, b))

    workers = max(1, min(int(workers), int(B)))
    if workers == 1:
        return np.array([one(b) for b in range(B)])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.array(list(pool.map(one, range(B))))


def estimate_quantile(eigenvalues, n, alpha, B, b_sq, seed, workers=1):
    """Monte-Carlo estimate of the null (1 - alpha)-quantile of the statistic."""
    order_index(alpha, B)
    reps = null_replicates(eigenvalues, n, b_sq, B, seed, workers)
    return order_statistic_threshold(reps, alpha)


def statistic_inputs(points, kernel, cov=None, rescale_target=DEFAULT_RESCALE_TARGET):
    """Gram matrix, null covariance diagonal and null model, scaled consistently.

    Without ``cov`` the null is estimated from the points.  Under an
    empirical null the Gram matrix is centered in feature space.
    """
    X = as_points(points, min_rows=2)
    with _step("gram"):
        K = gram_matrix(kernel, X)
    with _step("covariance"):
        if cov is None:
            cov = estimate_null_from_sample(K, kernel, X)
        if cov.origin is Origin.EMPIRICAL:
            K = center_gram(K)
        C_diag = covariance_diag(cov, X)
    with _step("rescale"):
        model = null_model(cov, rescale_target)
    if model.gamma != 1.0:
        K = model.gamma * K
        C_diag = model.gamma ** 2 * C_diag
    return K, C_diag, model


@contextmanager
def _step(name):
    try:
        yield
    except KernormError as exc:
        if getattr(exc, "step", None):
            raise
        new = exc.__class__.__new__(exc.__class__)
        new.__dict__.update(exc.__dict__)
        new.args = (f"[{name}] {exc}",)
        new.step = name
        raise new from exc


def run_test(points, kernel=None, cov=None, alpha=0.05, B=250, seed=0, workers=None,
             rescale_target=DEFAULT_RESCALE_TARGET):
    """Run the L-MMD test on ``points``.

    Parameters
    ----------
    points : array_like, shape (n, d)
    kernel : KernelSpec, optional
        Defaults to the linear kernel.
    cov : CovarianceSpec, optional
        Null covariance.  When omitted the null is the empirical Gaussian
        fitted to the sample.
    alpha, B : float, int
        Level and number of null replicates; requires ``alpha (B+1) >= 1``.
    seed : int
        Root seed of the null simulation.
    workers : int, optional
        Threads for the replicate loop.  The result does not depend on it.
    """
    with _step("configuration"):
        order_index(alpha, B)
    kernel = kernel or KernelSpec.linear()
    workers = default_workers() if workers is None else workers
    t0 = time.perf_counter()
    K, C_diag, model = statistic_inputs(points, kernel, cov, rescale_target)
    with _step("statistic"):
        stat = lmmd_statistic(K, C_diag, model.b_sq)
    t1 = time.perf_counter()
    with _step("quantile"):
        q = estimate_quantile(model.eigenvalues, K.shape[0], alpha, B, model.b_sq, seed, workers)
    t2 = time.perf_counter()
    return TestResult(
        statistic=stat,
        threshold=q,
        alpha=alpha,
        B=int(B),
        reject=bool(stat > q),
        seed=int(seed),
        elapsed=Elapsed(t1 - t0, t2 - t1),
        gamma=model.gamma,
        b_sq=model.b_sq,
    )


def type1_bounds(alpha, B):
    """Bracket ``[alpha - 1/(B+1), alpha]`` on the exact Type-I error."""
    order_index(alpha, B)
    lower = alpha - 1.0 / (B + 1)
    if abs(lower) < 1e-12:
        lower = 0.0
    return lower, alpha


def type2_bound(inputs):
    """Upper bound on the Type-II error, with the vanishing O_n / o_B terms dropped."""
    L, M, m2, q = inputs.L, inputs.M, inputs.m2, inputs.q
    if not (L > 0 and M > 0 and m2 > 0):
        raise DomainError("L, M and m2 must be positive")
    if not 0 < inputs.alpha < 1 or inputs.B < 1:
        raise DomainError("alpha must lie in (0, 1) and B >= 1")
    n = inputs.n
    if not n > inputs.min_n or n < 2:
        raise DomainError(f"bound requires n > (q + m2) / L^2 = {inputs.min_n:.6g}, got n = {n}")
    spread = math.exp(M * M / 2)
    f1 = 2 * m2
    f2 = (8 * math.sqrt(2) / 3) * L * L * spread * math.sqrt(f1)
    f3 = 1 + 3 * inputs.c_p0 / (8 * spread * L * L * math.sqrt(2 * m2 * inputs.alpha * inputs.B))
    gap = L - math.sqrt((q + m2) / (n - 1))
    return math.exp(-n * gap * gap / (f1 + f2)) * f3
