"""Seeded generators for the structured Gaussians and mixtures used in experiments.

The family is ``N(delta * (1, 1/2, ..., 1/d), lam * diag(1, 1/4, ..., 1/d^2))``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .null import diagonal_covariance


@dataclass(frozen=True)
class GaussianSpec:
    delta: float = 0.0
    lam: float = 0.5
    d: int = 25

    def __post_init__(self):
        if self.delta < 0 or self.lam < 0:
            raise InputError("delta and lam must be nonnegative")
        if int(self.d) != self.d or self.d < 1:
            raise InputError(f"d must be a positive integer, got {self.d}")

    @property
    def mean(self):
        return self.delta / np.arange(1, self.d + 1)

    @property
    def variances(self):
        return self.lam / np.arange(1, self.d + 1) ** 2

    def covariance_spec(self):
        """Null covariance for the linear kernel (centered at zero)."""
        return diagonal_covariance(self.variances)


@dataclass(frozen=True)
class MixtureSpec:
    weights: tuple
    components: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size != len(self.components) or w.size == 0:
            raise InputError("weights and components must be nonempty and of equal length")
        if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
            raise InputError(f"weights must be a probability vector, got {tuple(w)}")
        if len({c.d for c in self.components}) != 1:
            raise InputError("mixture components must share the dimension d")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def d(self):
        return self.components[0].d


def mixture_alternative(d, weights=(0.5, 0.5), shift=1.5, lam=0.5):
    """Two-component location mixture: means 0 and ``shift * (1, ..., 1/d)``."""
    return MixtureSpec(tuple(weights), (GaussianSpec(0.0, lam, d), GaussianSpec(shift, lam, d)))


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_gaussian(spec, n, seed):
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    rng = _rng(seed)
    return spec.mean + rng.standard_normal((n, spec.d)) * np.sqrt(spec.variances)


def sample_mixture(spec, n, seed, return_labels=False):
    """Rows drawn from component ``r`` with probability ``weights[r]``.

    One uniform per row is consumed for the component choice before any
    Gaussian draw.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    rng = _rng(seed)
    u = rng.random(n)
    edges = np.cumsum(spec.weights)
    labels = np.minimum(np.searchsorted(edges, u, side="right"), len(edges) - 1)
    G = rng.standard_normal((n, spec.d))
    means = np.array([c.mean for c in spec.components])
    scales = np.sqrt(np.array([c.variances for c in spec.components]))
    X = means[labels] + G * scales[labels]
    return (X, labels) if return_labels else X


def sample(spec, n, seed):
    if isinstance(spec, MixtureSpec):
        return sample_mixture(spec, n, seed)
    return sample_gaussian(spec, n, seed)
