"""Brute-force validation suites.

Each suite recomputes a library quantity by an independent, slow route and
reports whether the two agree.  They back the ``kernorm oracle`` command.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, stats

from ._seeding import make_rng
from .baselines import hz_beta, hz_statistic
from .lmmd import lmmd_statistic, order_index, order_statistic_threshold, simulate_null_statistic
from .null import null_norm_sq


@dataclass(frozen=True)
class OracleResult:
    name: str
    passed: bool
    detail: str


def determinant_norm(eigenvalues):
    """``det(I - Sigma^2)^(-1/2)`` evaluated on the full diagonal matrix."""
    S = np.diag(np.asarray(eigenvalues, dtype=float))
    return float(np.linalg.det(np.eye(len(S)) - S @ S) ** -0.5)


def brute_statistic(points, variances):
    """Double-loop evaluation of the statistic for a linear kernel and diagonal null."""
    X = np.asarray(points, dtype=float)
    v = np.asarray(variances, dtype=float)
    n = len(X)
    b_sq = determinant_norm(v)
    cross = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                cross += math.exp(float(np.dot(X[i], X[j])))
    single = sum(math.exp(0.5 * float(np.sum(v * X[i] ** 2))) for i in range(n))
    return cross / (n - 1) - 2 * single + n * b_sq


def check_null_norm(trials=100, d=6, seed=0):
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(trials):
        lam = rng.uniform(0, 0.95, size=d)
        worst = max(worst, abs(null_norm_sq(lam) / determinant_norm(lam) - 1))
    return OracleResult("null_norm", worst <= 1e-10, f"max relative error {worst:.3g}")


def check_statistic(n=12, d=3, seed=1):
    rng = make_rng(seed)
    v = np.array([0.5, 0.3, 0.1])[:d]
    X = rng.standard_normal((n, d)) * np.sqrt(v)
    fast = lmmd_statistic(X @ X.T, (X * X) @ v, determinant_norm(v))
    slow = brute_statistic(X, v)
    err = abs(fast - slow) / max(1.0, abs(slow))
    return OracleResult("statistic", err <= 1e-10, f"fast {fast:.10g} vs brute {slow:.10g}")


def brute_order_index(alpha, B):
    """Smallest rank whose exact rejection probability under exchangeability,
    ``(B + 1 - rank) / (B + 1)``, falls strictly below ``alpha`` (exact rationals)."""
    a = Fraction(str(alpha))
    for rank in range(1, B + 1):
        if Fraction(B + 1 - rank, B + 1) < a:
            return rank
    return B


def check_order_statistic(seed=2):
    rng = make_rng(seed)
    failures = 0
    for alpha, B in itertools.product((0.01, 0.05, 0.1, 0.25), (99, 100, 250, 999)):
        if alpha * (B + 1) < 1:
            continue
        reps = rng.standard_normal(B)
        rank = brute_order_index(alpha, B)
        if order_index(alpha, B) != rank or order_statistic_threshold(reps, alpha) != sorted(reps)[rank - 1]:
            failures += 1
    return OracleResult("order_statistic", failures == 0, f"{failures} mismatches")


def direct_null_statistics(variances, n, draws, seed):
    """Statistic computed on genuine Gaussian samples through the full pipeline."""
    v = np.asarray(variances, dtype=float)
    b_sq = null_norm_sq(v)
    rng = make_rng(seed)
    out = np.empty(draws)
    for k in range(draws):
        Z = rng.standard_normal((n, v.size)) * np.sqrt(v)
        out[k] = lmmd_statistic(Z @ Z.T, (Z * Z) @ v, b_sq)
    return out


def simulated_null_statistics(variances, n, draws, seed):
    v = np.asarray(variances, dtype=float)
    b_sq = null_norm_sq(v)
    return np.array([simulate_null_statistic(v, n, b_sq, make_rng(seed, k)) for k in range(draws)])


def check_simulator(variances=(0.5, 0.25, 0.1), n=20, draws=5000, seed=3, level=0.01):
    a = simulated_null_statistics(variances, n, draws, seed)
    b = direct_null_statistics(variances, n, draws, seed + 1)
    res = stats.ks_2samp(a, b)
    return OracleResult("simulator", bool(res.pvalue > level), f"KS {res.statistic:.4f}, p = {res.pvalue:.3g}")


def hz_quadrature(x):
    """One-dimensional Henze-Zirkler statistic by numerical integration of the
    weighted squared gap between characteristic functions."""
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    y = (x - x.mean()) / x.std()
    beta = hz_beta(n, 1)

    def integrand(t):
        ecf = np.exp(1j * t * y).mean()
        gap = abs(ecf - math.exp(-t * t / 2)) ** 2
        return gap * math.exp(-t * t / (2 * beta * beta)) / math.sqrt(2 * math.pi * beta * beta)

    val, _ = integrate.quad(integrand, -np.inf, np.inf, limit=400, epsabs=1e-13, epsrel=1e-11)
    return n * val


def check_hz(seed=4):
    x = make_rng(seed).standard_normal(7)
    fast = hz_statistic(x[:, None])
    slow = hz_quadrature(x)
    err = abs(fast - slow) / max(1e-12, abs(slow))
    return OracleResult("henze_zirkler", err <= 1e-6, f"closed form {fast:.10g} vs quadrature {slow:.10g}")


SUITES = {
    "null_norm": check_null_norm,
    "statistic": check_statistic,
    "order_statistic": check_order_statistic,
    "simulator": check_simulator,
    "henze_zirkler": check_hz,
}


def run_oracles(names=None):
    names = list(SUITES) if not names else list(names)
    unknown = set(names) - set(SUITES)
    if unknown:
        raise KeyError(f"unknown oracle suites {sorted(unknown)}; choose from {sorted(SUITES)}")
    return [SUITES[name]() for name in names]
