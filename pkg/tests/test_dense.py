import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavekrylov import DenseSym, cholesky, generalized_sym_eig, sym_eig
from wavekrylov.dense import DenseEigError, NotPositiveDefinite


def random_spd(rng, n):
    X = rng.standard_normal((n, n))
    return X.T @ X + np.eye(n)


def test_densesym_symmetrizes():
    A = DenseSym([[1.0, 2.0], [4.0, 1.0]])
    np.testing.assert_array_equal(A.values, [[1, 3], [3, 1]])
    assert A.n == 2


def test_cholesky_small():
    np.testing.assert_array_equal(cholesky(np.eye(3)), np.eye(3))
    L = cholesky(DenseSym([[4.0, 2.0], [2.0, 3.0]]))
    np.testing.assert_allclose(L, [[2, 0], [1, np.sqrt(2)]], rtol=1e-15)


def test_cholesky_random(rng):
    A = random_spd(rng, 50)
    L = cholesky(A)
    assert np.all(np.triu(L, 1) == 0)
    assert np.abs(L @ L.T - A).max() <= 1e-12 * np.abs(A).max()


def test_cholesky_reports_pivot():
    with pytest.raises(NotPositiveDefinite, match="not positive definite") as info:
        cholesky([[1.0, 0.0, 0.0], [0.0, 1.0, 2.0], [0.0, 2.0, 1.0]])
    assert info.value.pivot == 2


@pytest.mark.parametrize("method", ["jacobi", "lapack"])
def test_sym_eig_small(method):
    w, V = sym_eig(np.diag([3.0, 1.0, 2.0]), method)
    np.testing.assert_array_equal(w, [1, 2, 3])
    np.testing.assert_allclose(np.abs(V), [[0, 0, 1], [1, 0, 0], [0, 1, 0]], atol=1e-15)
    w, V = sym_eig([[0.0, 1.0], [1.0, 0.0]], method)
    np.testing.assert_allclose(w, [-1, 1], atol=1e-15)
    s = np.sqrt(0.5)
    np.testing.assert_allclose(np.abs(V), [[s, s], [s, s]], atol=1e-15)
    assert V[0, 0] * V[1, 0] < 0


@pytest.mark.parametrize("method", ["jacobi", "lapack"])
def test_sym_eig_random(rng, method):
    X = rng.standard_normal((100, 100))
    A = X + X.T
    w, V = sym_eig(A, method)
    norm = np.linalg.norm(A, 2)
    assert np.abs(A @ V - V * w).max() <= 1e-11 * norm
    assert np.abs(V.T @ V - np.eye(100)).max() <= 1e-12
    assert np.all(np.diff(w) >= 0)


def test_sym_eig_methods_agree(rng):
    X = rng.standard_normal((40, 40))
    A = X + X.T
    np.testing.assert_allclose(sym_eig(A, "jacobi")[0], sym_eig(A, "lapack")[0], atol=1e-12)


def test_sym_eig_one_by_one():
    w, V = sym_eig([[5.0]], "jacobi")
    assert w.tolist() == [5.0] and V.tolist() == [[1.0]]


def test_sym_eig_bad_method():
    with pytest.raises(ValueError):
        sym_eig(np.eye(2), "qr")


def test_generalized_identity_mass_is_standard(rng):
    X = rng.standard_normal((12, 12))
    A = X + X.T
    w, _ = generalized_sym_eig(A, np.eye(12))
    np.testing.assert_allclose(w, np.linalg.eigvalsh(A), atol=1e-12)


def test_generalized_diagonal_ratio():
    w, V = generalized_sym_eig([[2.0, 0.0], [0.0, 8.0]], [[2.0, 0.0], [0.0, 2.0]])
    np.testing.assert_allclose(w, [1.0, 4.0], rtol=1e-15)
    np.testing.assert_allclose(V.T @ (2 * np.eye(2)) @ V, np.eye(2), atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_generalized_definitions(n, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, n))
    S = X.T @ X
    M = random_spd(rng, n)
    w, V = generalized_sym_eig(S, M)
    assert w.shape == (n,)
    ns, nm = np.linalg.norm(S, 2), np.linalg.norm(M, 2)
    for j in range(n):
        r = S @ V[:, j] - w[j] * M @ V[:, j]
        assert np.linalg.norm(r) <= 1e-10 * (ns + abs(w[j]) * nm) * max(1.0, np.linalg.norm(V[:, j]))
    assert np.abs(V.T @ M @ V - np.eye(n)).max() <= 1e-11
    assert w.min() >= -1e-10 * ns


def test_generalized_propagates_cholesky_failure():
    with pytest.raises(NotPositiveDefinite):
        generalized_sym_eig(np.eye(2), [[1.0, 1.0], [1.0, 1.0]])
    assert issubclass(NotPositiveDefinite, DenseEigError)
