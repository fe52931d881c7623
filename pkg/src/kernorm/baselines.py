"""Comparison tests: random projections + Kolmogorov-Smirnov, the asymptotic
L-MMD variant, Henze-Zirkler and the energy distance.

Every Monte-Carlo threshold here uses the same order-statistic rule as the
L-MMD quantile, with replicate ``b`` drawn from the child stream ``(seed, b)``.
"""

import enum
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla
from scipy.spatial.distance import pdist
from scipy.stats import kstwobign, norm

from ._seeding import derive_seed, make_rng
from .errors import InputError, NumericError
from .linalg import KernelSpec, as_points, center_gram, psd_floor
from .lmmd import (
    EXP_GUARD,
    Elapsed,
    trim_spectrum,
    lmmd_statistic,
    order_index,
    order_statistic_threshold,
    statistic_inputs,
)
from .null import DEFAULT_RESCALE_TARGET

__all__ = [
    "Method",
    "BaselineResult",
    "ks_statistic",
    "kolmogorov_critical_value",
    "gaussian_marginal_factory",
    "gaussian_direction_sampler",
    "gaussian_sampler",
    "random_projection_test",
    "lmmda_reference_spectrum",
    "lmmda_quantile",
    "lmmda_test",
    "hz_beta",
    "hz_statistic",
    "hz_test",
    "energy_statistic",
    "energy_test",
]

_MAX_DIRECTION_RETRIES = 16


class Method(enum.Enum):
    RANDOM_PROJECTION = "rp"
    LMMDA = "lmmda"
    HENZE_ZIRKLER = "hz"
    ENERGY_DISTANCE = "ed"


@dataclass(frozen=True)
class BaselineResult:
    method: Method
    statistic: float
    threshold: float
    reject: bool
    seed: int
    elapsed: Elapsed = field(default_factory=Elapsed, compare=False)


def _result(method, stat, threshold, seed, t0, t1, t2):
    return BaselineResult(method, float(stat), float(threshold), bool(stat > threshold), int(seed),
                          Elapsed(t1 - t0, t2 - t1))


# -- Kolmogorov-Smirnov on random projections ---------------------------------

def ks_statistic(sample, null_cdf):
    """``sup_x |F_n(x) - F_0(x)|`` for a sorted sample."""
    x = np.asarray(sample, dtype=float).ravel()
    n = x.size
    if n < 1:
        raise InputError("KS statistic needs at least one observation")
    if np.any(np.diff(x) < 0):
        raise InputError("sample must be sorted ascending")
    F = np.asarray(null_cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(np.abs(i / n - F)), np.max(np.abs((i - 1) / n - F))))


def kolmogorov_critical_value(alpha, n):
    """Asymptotic Kolmogorov critical value ``c(alpha) / sqrt(n)``."""
    return float(kstwobign.isf(alpha) / np.sqrt(n))


def gaussian_marginal_factory(mean, cov):
    """For direction ``h``, the cdf of ``<Z, h>`` with ``Z ~ N(mean, cov)``."""
    mean = np.asarray(mean, dtype=float).ravel()
    cov = np.asarray(cov, dtype=float)
    if cov.ndim == 1:
        cov = np.diag(cov)

    def factory(h):
        loc = float(mean @ h)
        scale = float(np.sqrt(max(h @ cov @ h, 0.0)))
        if scale == 0:
            return lambda x: (np.asarray(x) >= loc).astype(float)
        return lambda x: norm.cdf(x, loc=loc, scale=scale)

    return factory


def gaussian_direction_sampler(variances):
    """Directions ``h ~ N(0, diag(variances))``."""
    sd = np.sqrt(np.asarray(variances, dtype=float).ravel())
    return lambda rng: rng.standard_normal(sd.size) * sd


def gaussian_sampler(mean, cov):
    """``sampler(m, rng)`` drawing ``m`` rows of ``N(mean, cov)``."""
    mean = np.asarray(mean, dtype=float).ravel()
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    try:
        root = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        w, V = np.linalg.eigh(0.5 * (cov + cov.T))
        root = V * np.sqrt(psd_floor(w))
    return lambda m, rng: mean + rng.standard_normal((m, mean.size)) @ root.T


def _draw_directions(sampler, count, rng):
    out = []
    for _ in range(count):
        for _attempt in range(_MAX_DIRECTION_RETRIES):
            h = np.asarray(sampler(rng), dtype=float).ravel()
            if np.linalg.norm(h) > 0:
                out.append(h)
                break
        else:
            raise NumericError(f"direction sampler returned zero vectors {_MAX_DIRECTION_RETRIES} times")
    return out


def _max_ks(X, directions, cdfs):
    return max(ks_statistic(np.sort(X @ h), cdf) for h, cdf in zip(directions, cdfs))


def random_projection_test(points, direction_sampler, null_marginal_cdf_factory, alpha=0.05,
                           n_directions=1, mc_B=None, null_sampler=None, seed=0):
    """Largest KS distance over random one-dimensional projections.

    With one direction the statistic is distribution free and the threshold
    is the asymptotic Kolmogorov value.  With several, the threshold is the
    order statistic of ``mc_B`` maxima computed on samples from
    ``null_sampler(n, rng)`` projected onto the same directions.
    """
    X = as_points(points)
    n = X.shape[0]
    if n_directions < 1:
        raise InputError("n_directions must be >= 1")
    if n_directions > 1:
        if null_sampler is None or mc_B is None:
            raise InputError("several directions need null_sampler and mc_B for the Monte-Carlo threshold")
        order_index(alpha, mc_B)
    t0 = time.perf_counter()
    directions = _draw_directions(direction_sampler, n_directions, make_rng(seed, 0))
    cdfs = [null_marginal_cdf_factory(h) for h in directions]
    stat = _max_ks(X, directions, cdfs)
    t1 = time.perf_counter()
    if n_directions == 1:
        threshold = kolmogorov_critical_value(alpha, n)
    else:
        reps = [_max_ks(np.asarray(null_sampler(n, make_rng(seed, 1, b))), directions, cdfs)
                for b in range(mc_B)]
        threshold = order_statistic_threshold(reps, alpha)
    return _result(Method.RANDOM_PROJECTION, stat, threshold, seed, t0, t1, time.perf_counter())


# -- asymptotic L-MMD ---------------------------------------------------------

def lmmda_reference_spectrum(eigenvalues, m, seed):
    """Eigenvalues of the centered exponential-kernel Gram matrix of an
    ``m``-point null sample, divided by ``m``.

    The null sample is represented through its inner products
    ``<Z_i, Z_j> = sum_r lambda_r G_ir G_jr``.
    """
    lam = trim_spectrum(eigenvalues)
    if lam.size == 0:
        return np.zeros(1)
    G = make_rng(seed).standard_normal((m, lam.size))
    A = (G * lam) @ G.T
    if A.max() > EXP_GUARD:
        raise NumericError("reference Gram matrix overflows exp; rescale the null")
    Kbar = center_gram(np.exp(A))
    w = np.linalg.eigvalsh(Kbar)[::-1]
    return psd_floor(w, scale=m * np.abs(Kbar).max()) / m


def lmmda_quantile(eigenvalues, alpha, n_draws, seed):
    """Order-statistic quantile of ``sum_r nu_r (chi2_1 - 1)`` from ``n_draws`` variates."""
    nu = np.asarray(eigenvalues, dtype=float).ravel()
    if np.any(nu < 0):
        raise InputError("weights must be nonnegative")
    order_index(alpha, n_draws)
    nu = nu[nu > 0]
    if nu.size == 0:
        return 0.0
    rng = make_rng(seed)
    draws = np.empty(n_draws)
    chunk = max(1, 2_000_000 // nu.size)
    for start in range(0, n_draws, chunk):
        stop = min(start + chunk, n_draws)
        draws[start:stop] = (rng.chisquare(1, (stop - start, nu.size)) - 1) @ nu
    return order_statistic_threshold(draws, alpha)


def lmmda_test(points, kernel=None, cov=None, alpha=0.05, n_draws=250, seed=0, reference_size=None,
               rescale_target=DEFAULT_RESCALE_TARGET):
    """L-MMD statistic thresholded by its asymptotic weighted chi-square law."""
    kernel = kernel or KernelSpec.linear()
    order_index(alpha, n_draws)
    t0 = time.perf_counter()
    K, C_diag, model = statistic_inputs(points, kernel, cov, rescale_target)
    stat = lmmd_statistic(K, C_diag, model.b_sq)
    t1 = time.perf_counter()
    m = reference_size or K.shape[0]
    nu = lmmda_reference_spectrum(model.eigenvalues, m, derive_seed(seed, 0))
    threshold = lmmda_quantile(nu, alpha, n_draws, derive_seed(seed, 1))
    return _result(Method.LMMDA, stat, threshold, seed, t0, t1, time.perf_counter())


# -- Henze-Zirkler ------------------------------------------------------------

def hz_beta(n, d):
    """Smoothing parameter ``2^(-1/2) ((2d + 1) n / 4)^(1/(d + 4))``."""
    return 2 ** -0.5 * ((2 * d + 1) * n / 4) ** (1 / (d + 4))


def _whiten(X):
    n, d = X.shape
    if n <= d:
        raise InputError(f"standardization needs n > d (n={n}, d={d}); reduce the dimension")
    centered = X - X.mean(axis=0)
    S = centered.T @ centered / n
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        raise InputError("empirical covariance is singular; reduce the dimension") from None
    if np.linalg.cond(S) > 1e12:
        raise InputError("empirical covariance is numerically singular; reduce the dimension")
    return sla.solve_triangular(L, centered.T, lower=True).T


def hz_statistic(points):
    """Henze-Zirkler statistic of the sample standardized by its own mean and covariance."""
    X = as_points(points, min_rows=2)
    n, d = X.shape
    Y = _whiten(X)
    b2 = hz_beta(n, d) ** 2
    sq = np.einsum("ij,ij->i", Y, Y)
    D = sq[:, None] + sq[None, :] - 2 * (Y @ Y.T)
    np.maximum(D, 0, out=D)
    pair = np.exp(-0.5 * b2 * D).sum() / n
    single = 2 * (1 + b2) ** (-d / 2) * np.exp(-0.5 * b2 * sq / (1 + b2)).sum()
    return float(pair - single + n * (1 + 2 * b2) ** (-d / 2))


def _empirical_gaussian(X, ddof):
    mean = X.mean(axis=0)
    centered = X - mean
    return mean, centered.T @ centered / (X.shape[0] - ddof)


def hz_test(points, alpha=0.05, mc_B=99, seed=0):
    """Henze-Zirkler test, threshold simulated under ``N(mean_hat, cov_hat)``."""
    X = as_points(points, min_rows=2)
    order_index(alpha, mc_B)
    n = X.shape[0]
    t0 = time.perf_counter()
    stat = hz_statistic(X)
    t1 = time.perf_counter()
    sampler = gaussian_sampler(*_empirical_gaussian(X, ddof=0))
    reps = [hz_statistic(sampler(n, make_rng(seed, b))) for b in range(mc_B)]
    threshold = order_statistic_threshold(reps, alpha)
    return _result(Method.HENZE_ZIRKLER, stat, threshold, seed, t0, t1, time.perf_counter())


# -- energy distance ----------------------------------------------------------

def energy_statistic(points, null_sampler, m_null=1000, seed=0, squared=False):
    """Energy distance between the sample and a null known through a sampler.

    ``2 E||Y - Z|| - E||Z - Z'|| - E||Y - Y'||`` with the null expectations
    estimated from ``m_null`` draws.  Within-sample terms average over
    distinct pairs, so the estimate is unbiased for the population value
    (zero when the sample follows the null).  ``squared`` switches every
    norm to its square.
    """
    X = as_points(points, min_rows=2)
    if m_null < 2:
        raise InputError("m_null must be >= 2")
    Z = np.asarray(null_sampler(m_null, make_rng(seed)), dtype=float)
    if Z.shape != (m_null, X.shape[1]):
        raise InputError(f"null sampler returned shape {Z.shape}, expected {(m_null, X.shape[1])}")
    metric = "sqeuclidean" if squared else "euclidean"
    cross = _cross_distances(X, Z, squared).mean()
    within_null = pdist(Z, metric).mean()
    within_sample = pdist(X, metric).mean()
    return float(2 * cross - within_null - within_sample)


def _cross_distances(A, B, squared):
    """Pairwise (squared) Euclidean distances through one matrix product."""
    D = np.einsum("ij,ij->i", A, A)[:, None] + np.einsum("ij,ij->i", B, B)[None, :]
    D -= 2 * (A @ B.T)
    np.maximum(D, 0, out=D)
    return D if squared else np.sqrt(D, out=D)


def energy_test(points, alpha=0.05, mc_B=99, m_null=1000, seed=0, squared=False, standardize=True):
    """Energy-distance test of multivariate normality with a parametric-bootstrap threshold.

    With ``standardize`` (the default) the sample is first standardized by
    its own mean and covariance and compared with ``N(0, I)``, which makes
    the test affine invariant; each replicate standardizes a fresh
    ``N(0, I)`` sample the same way.  Otherwise the sample is compared in
    its own coordinates with ``N(mean_hat, cov_hat)`` and each replicate
    refits the mean and covariance of a sample drawn from that fit.
    """
    X = as_points(points, min_rows=2)
    order_index(alpha, mc_B)
    n, d = X.shape
    t0 = time.perf_counter()
    if standardize:
        X = _whiten(X)
        fitted = gaussian_sampler(np.zeros(d), np.eye(d))
    else:
        fitted = gaussian_sampler(*_empirical_gaussian(X, ddof=1))
    stat = energy_statistic(X, fitted, m_null, derive_seed(seed, 0), squared)
    t1 = time.perf_counter()
    reps = []
    for b in range(mc_B):
        Zb = fitted(n, make_rng(seed, 1, b))
        if standardize:
            Zb, refit = _whiten(Zb), fitted
        else:
            refit = gaussian_sampler(*_empirical_gaussian(Zb, ddof=1))
        reps.append(energy_statistic(Zb, refit, m_null, derive_seed(seed, 2, b), squared))
    threshold = order_statistic_threshold(reps, alpha)
    return _result(Method.ENERGY_DISTANCE, stat, threshold, seed, t0, t1, time.perf_counter())
