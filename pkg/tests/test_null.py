import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kernorm.errors import DomainError, InputError
from kernorm.linalg import KernelSpec, center_gram, gram_matrix
from kernorm.null import (
    CovarianceSpec,
    Origin,
    covariance_diag,
    covariance_matrix,
    diagonal_covariance,
    estimate_null_from_sample,
    null_model,
    null_norm_sq,
    rescale,
    zero_covariance,
)


def det_norm(lam):
    S = np.diag(lam)
    return np.linalg.det(np.eye(len(lam)) - S @ S) ** -0.5


def test_null_norm_examples():
    assert null_norm_sq([]) == 1.0
    assert null_norm_sq([0.0, 0.0]) == 1.0
    assert null_norm_sq([0.5]) == pytest.approx(1.154701, abs=1e-6)
    assert null_norm_sq([0.5, 0.25]) == pytest.approx(1.192570, abs=1e-6)


def test_null_norm_matches_determinant():
    rng = np.random.default_rng(0)
    for d in range(1, 11):
        lam = rng.uniform(0, 0.95, size=d)
        assert null_norm_sq(lam) == pytest.approx(det_norm(lam), rel=1e-10)


def test_null_norm_domain():
    with pytest.raises(DomainError):
        null_norm_sq([1.0])
    with pytest.raises(DomainError):
        null_norm_sq([-0.1])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 0.95), min_size=1, max_size=6), st.integers(0, 5), st.floats(0, 0.04))
def test_null_norm_monotone(lam, idx, bump):
    lam = np.array(lam)
    base = null_norm_sq(lam)
    assert base >= 1.0
    lam[idx % len(lam)] += bump
    assert null_norm_sq(lam) >= base


def test_covariance_matrix_examples():
    np.testing.assert_array_equal(covariance_matrix(zero_covariance(), np.ones((3, 2))), np.zeros((3, 3)))
    cov = diagonal_covariance([0.5])
    np.testing.assert_allclose(covariance_matrix(cov, [[1], [2]]), [[0.5, 1], [1, 2]])
    lam = 0.5
    d = 4
    cov = diagonal_covariance(lam / np.arange(1, d + 1) ** 2)
    e1 = np.eye(d)[:1]
    assert covariance_matrix(cov, e1)[0, 0] == pytest.approx(lam)
    X = np.random.default_rng(1).standard_normal((5, d))
    np.testing.assert_allclose(covariance_diag(cov, X), np.diag(covariance_matrix(cov, X)))


def test_covariance_spec_validation():
    with pytest.raises(InputError):
        CovarianceSpec(np.array([0.1, 0.5]), lambda X, Y: X @ Y.T, Origin.PARAMETRIC)
    with pytest.raises(InputError):
        CovarianceSpec(np.array([-0.1]), lambda X, Y: X @ Y.T, Origin.PARAMETRIC)


def test_rescale_examples():
    K = np.array([[1.0, 2.0], [2.0, 5.0]])
    C = np.array([[3.0, 1.0], [1.0, 4.0]])
    gamma, K2, C2, lam = rescale(K, C, [2.0, 1.0], 0.9)
    assert gamma == pytest.approx(0.45)
    np.testing.assert_allclose(K2, 0.45 * K)
    np.testing.assert_allclose(C2, 0.2025 * C)
    np.testing.assert_allclose(lam, [0.9, 0.45])
    gamma, K2, C2, lam = rescale(K, C, [0.9], 0.9)
    assert gamma == 1.0
    np.testing.assert_array_equal(K2, K)
    _, _, _, lam = rescale(K, C, [0.5, 0.25], 0.9)
    np.testing.assert_allclose(lam, [0.9, 0.45])
    gamma, K2, _, _ = rescale(K, C, [0.0], 0.9)
    assert gamma == 1.0


def test_null_model_rescales_only_at_or_above_one():
    m = null_model(diagonal_covariance([0.5, 0.25]))
    assert m.gamma == 1.0
    assert m.b_sq == pytest.approx(1.192570, abs=1e-6)
    m = null_model(diagonal_covariance([2.0, 1.0]))
    assert m.gamma == pytest.approx(0.45)
    np.testing.assert_allclose(m.eigenvalues, [0.9, 0.45])
    assert m.b_sq == pytest.approx(det_norm([0.9, 0.45]), rel=1e-10)


def test_empirical_null_examples():
    K = gram_matrix(KernelSpec.linear(), np.ones((4, 2)))
    np.testing.assert_allclose(estimate_null_from_sample(K).eigenvalues, 0, atol=1e-12)
    K = gram_matrix(KernelSpec.linear(), [[-1.0], [1.0]])
    lam = estimate_null_from_sample(K).eigenvalues
    assert lam[0] == pytest.approx(1.0)
    np.testing.assert_allclose(lam[1:], 0, atol=1e-12)


def test_empirical_null_is_consistent():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((2000, 2)) * np.sqrt([4.0, 1.0])
    cov = estimate_null_from_sample(gram_matrix(KernelSpec.linear(), X))
    assert cov.origin is Origin.EMPIRICAL
    np.testing.assert_allclose(cov.eigenvalues[:2], [4.0, 1.0], rtol=0.15)


def test_empirical_null_trace_and_evaluator():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((30, 3))
    spec = KernelSpec.gaussian(0.4)
    K = gram_matrix(spec, X)
    cov = estimate_null_from_sample(K, spec, X)
    Kc = center_gram(K)
    assert cov.eigenvalues.sum() == pytest.approx(np.trace(Kc) / 30, rel=1e-8)
    np.testing.assert_allclose(covariance_matrix(cov, X), Kc @ Kc / 30, atol=1e-12)
    np.testing.assert_allclose(covariance_diag(cov, X), np.diag(Kc @ Kc) / 30, atol=1e-12)
    with pytest.raises(InputError):
        covariance_matrix(estimate_null_from_sample(K), X)


def test_empirical_linear_covariance_is_sample_covariance():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((50, 3)) @ rng.standard_normal((3, 3))
    cov = estimate_null_from_sample(gram_matrix(KernelSpec.linear(), X), KernelSpec.linear(), X)
    Xc = X - X.mean(axis=0)
    S = Xc.T @ Xc / 50
    np.testing.assert_allclose(cov.eigenvalues[:3], np.sort(np.linalg.eigvalsh(S))[::-1], rtol=1e-10)
    np.testing.assert_allclose(covariance_matrix(cov, X), Xc @ S @ Xc.T, atol=1e-10)
