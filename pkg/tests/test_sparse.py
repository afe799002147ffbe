import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavekrylov import CsrMatrix, check_symmetric, csr_from_triplets, diag_inverse, spmv
from wavekrylov.sparse import SparseError

from conftest import random_symmetric_csr


def dense_assembly_1d(n_cells, h):
    """Element-by-element P1 stiffness assembly, the textbook way."""
    A = np.zeros((n_cells + 1, n_cells + 1))
    local = np.array([[1.0, -1.0], [-1.0, 1.0]]) / h
    for e in range(n_cells):
        A[e:e + 2, e:e + 2] += local
    return A


def test_duplicates_are_summed():
    A = csr_from_triplets([(0, 0, 2.0), (0, 0, 1.0)], 1)
    assert A.nnz == 1
    assert A.to_dense().tolist() == [[3.0]]


def test_symmetric_offdiagonal_pair():
    A = csr_from_triplets([(0, 1, 1.0), (1, 0, 1.0)], 2)
    assert A.to_dense().tolist() == [[0.0, 1.0], [1.0, 0.0]]
    assert check_symmetric(A, 0.0)


def test_laplacian_triplets_match_dense_assembly():
    h = 1.0
    trip = []
    for e in range(2):
        for a in range(2):
            for b in range(2):
                trip.append((e + a, e + b, (1.0 if a == b else -1.0) / h))
    A = csr_from_triplets(trip, 3)
    np.testing.assert_array_equal(A.to_dense(), dense_assembly_1d(2, h))
    np.testing.assert_array_equal(A.to_dense(), [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])


def test_zero_sums_dropped_unless_requested():
    trip = [(0, 1, 1.0), (0, 1, -1.0), (1, 1, 2.0)]
    assert csr_from_triplets(trip, 2).nnz == 1
    kept = csr_from_triplets(trip, 2, keep_zeros=True)
    assert kept.nnz == 2
    assert kept.values[0] == 0.0


def test_rows_sorted_and_offsets_valid():
    A = csr_from_triplets([(1, 2, 1.0), (0, 1, 2.0), (1, 0, 3.0), (2, 2, 4.0)], 3)
    assert A.row_offsets.tolist() == [0, 1, 3, 4]
    assert A.col_indices.tolist() == [1, 0, 2, 2]


@pytest.mark.parametrize("entry", [(0, 3, 1.0), (3, 0, 1.0), (-1, 0, 1.0)])
def test_out_of_range_index_rejected(entry):
    with pytest.raises(SparseError, match="out of range"):
        csr_from_triplets([entry], 3)


def test_malformed_csr_rejected():
    with pytest.raises(SparseError):
        CsrMatrix(2, [0, 2, 1], [0, 1, 1], [1.0, 1.0, 1.0])
    with pytest.raises(SparseError, match="strictly increasing"):
        CsrMatrix(2, [0, 2, 2], [1, 0], [1.0, 1.0])


def test_arrays_are_read_only():
    A = CsrMatrix.identity(3)
    with pytest.raises(ValueError):
        A.values[0] = 5.0


def test_spmv_identity():
    np.testing.assert_array_equal(spmv(CsrMatrix.identity(3), np.array([1.0, 2.0, 3.0])),
                                  [1.0, 2.0, 3.0])


def test_spmv_tridiag_constant_vector():
    T = CsrMatrix.from_dense([[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
    np.testing.assert_array_equal(T @ np.ones(3), [1.0, 0.0, 1.0])


def test_spmv_against_dense(rng):
    A, D = random_symmetric_csr(rng, 50)
    x = rng.standard_normal(50)
    assert np.abs(spmv(A, x) - D @ x).max() <= 1e-14


def test_spmv_dimension_mismatch():
    with pytest.raises(SparseError):
        spmv(CsrMatrix.identity(3), np.ones(4))


def test_spmv_bit_reproducible(rng):
    A, _ = random_symmetric_csr(rng, 40, density=0.5)
    x = rng.standard_normal(40)
    np.testing.assert_array_equal(spmv(A, x), spmv(A, x))


def test_spmv_handles_empty_rows():
    A = csr_from_triplets([(0, 0, 1.0), (2, 1, 4.0)], 3)
    np.testing.assert_array_equal(spmv(A, np.array([1.0, 2.0, 3.0])), [1.0, 0.0, 8.0])


@pytest.mark.parametrize("n", [1, 7, 50])
def test_spmv_unit_vectors_give_columns(rng, n):
    A, D = random_symmetric_csr(rng, n, density=0.3)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        np.testing.assert_array_equal(spmv(A, e), D[:, j])


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_symmetric_bilinear_form(n, seed):
    rng = np.random.default_rng(seed)
    A, _ = random_symmetric_csr(rng, n, density=0.4)
    x, y = rng.standard_normal(n), rng.standard_normal(n)
    lhs, rhs = x @ spmv(A, y), y @ spmv(A, x)
    scale = np.abs(x) @ np.abs(A.to_dense()) @ np.abs(y)
    assert abs(lhs - rhs) <= 1e-13 * max(scale, 1e-300)


def test_check_symmetric_cases():
    T = CsrMatrix.from_dense([[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
    assert check_symmetric(T)
    assert not check_symmetric(csr_from_triplets([(0, 1, 1.0)], 2), 0.0)
    near = csr_from_triplets([(0, 1, 1.0), (1, 0, 1.0 + 1e-9)], 2)
    assert not check_symmetric(near, 0.0)
    assert check_symmetric(near, 1e-8)


def test_diag_inverse_examples():
    np.testing.assert_array_equal(diag_inverse(CsrMatrix.diag([2.0, 4.0])).inv_values, [0.5, 0.25])
    np.testing.assert_array_equal(diag_inverse(CsrMatrix.identity(3)).inv_values, np.ones(3))


def test_diag_inverse_lumped_p1_mass():
    # row-sum lumping of the consistent P1 mass matrix, h = 0.25, 4 cells
    h = 0.25
    consistent = np.zeros((5, 5))
    for e in range(4):
        consistent[e:e + 2, e:e + 2] += h / 6 * np.array([[2.0, 1.0], [1.0, 2.0]])
    lumped = CsrMatrix.diag(consistent.sum(axis=1))
    np.testing.assert_allclose(diag_inverse(lumped).inv_values, [8, 4, 4, 4, 8], rtol=1e-15)


def test_diag_inverse_errors():
    with pytest.raises(SparseError, match="not lumped"):
        diag_inverse(CsrMatrix.from_dense([[1.0, 0.1], [0.1, 1.0]]))
    with pytest.raises(SparseError, match="not positive definite"):
        diag_inverse(CsrMatrix.diag([1.0, -1.0]))
    with pytest.raises(SparseError, match="not positive definite"):
        diag_inverse(csr_from_triplets([(0, 0, 1.0)], 2))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(1e-6, 1e6), min_size=1, max_size=30), st.integers(0, 2**32 - 1))
def test_diag_inverse_roundtrip(d, seed):
    d = np.array(d)
    x = np.random.default_rng(seed).standard_normal(d.size)
    back = diag_inverse(CsrMatrix.diag(d)).apply(d * x)
    np.testing.assert_allclose(back, x, rtol=1e-15, atol=0)
