"""The numba and numpy kernel flavors must agree bit for bit."""
import numpy as np
import pytest

from wavekrylov import FilterSpec, kernels, laplacian_2d_rect

from conftest import kernel, random_symmetric_csr


@pytest.fixture(scope="module")
def pencil():
    return laplacian_2d_rect(12, 9, 1.2, 0.9)


def test_spmv_flavors_match(rng, backend):
    A, D = random_symmetric_csr(rng, 60, density=0.3)
    x = rng.standard_normal(60)
    got = kernel("spmv", backend)(A.row_offsets, A.col_indices, A.values, x)
    np.testing.assert_array_equal(got, kernels.spmv_numpy(A.row_offsets, A.col_indices, A.values, x))


def test_filtered_apply_flavors_match(rng, backend, pencil):
    S = pencil.stiffness
    spec = FilterSpec(0.0, 3.0, 0.02, 150)
    r = rng.standard_normal(pencil.n)
    args = (S.row_offsets, S.col_indices, S.values, pencil.minv.inv_values, r, spec.tau,
            spec.alpha_samples)
    np.testing.assert_array_equal(kernel("filtered_apply", backend)(*args),
                                  kernels.filtered_apply_numpy(*args))


def test_filtered_apply_single_step(backend, pencil):
    S = pencil.stiffness
    r = np.linspace(-1, 1, pencil.n)
    out = kernel("filtered_apply", backend)(S.row_offsets, S.col_indices, S.values,
                                            pencil.minv.inv_values, r, 0.1, np.array([2.0]))
    np.testing.assert_array_equal(out, 0.1 * 2.0 * r)


def test_scalar_q_and_filter_sum_flavors_match(backend):
    alpha = np.cos(np.arange(300) * 0.01)
    omegas = np.linspace(0, 30, 41)
    np.testing.assert_array_equal(kernel("filter_sum", backend)(omegas, 0.05, alpha),
                                  kernels.filter_sum_numpy(omegas, 0.05, alpha))
    np.testing.assert_array_equal(kernel("scalar_q", backend)(3.3, 0.05, 500),
                                  kernels.scalar_q_numpy(3.3, 0.05, 500))


def test_cholesky_flavors(rng, backend):
    X = rng.standard_normal((30, 30))
    A = X.T @ X + np.eye(30)
    L, info = kernel("cholesky", backend)(A)
    assert info == -1
    np.testing.assert_allclose(L @ L.T, A, atol=1e-12 * np.abs(A).max())
    bad = A.copy()
    bad[4, 4] = -100.0
    _, info = kernel("cholesky", backend)(bad)
    assert info == 4


def test_jacobi_flavors(rng, backend):
    X = rng.standard_normal((25, 25))
    A = X + X.T
    work, V = A.copy(), np.eye(25)
    sweeps = kernel("jacobi", backend)(work, V, 60)
    assert 0 <= sweeps < 60
    np.testing.assert_allclose(np.sort(np.diag(work)), np.linalg.eigvalsh(A), atol=1e-12)
    np.testing.assert_allclose(V.T @ V, np.eye(25), atol=1e-13)
