"""Compressed-row sparse storage and the handful of operations the solver needs."""
from dataclasses import dataclass

import numpy as np

from . import kernels


class SparseError(ValueError):
    """Invalid sparse matrix construction or use."""


@dataclass(frozen=True, eq=False)
class CsrMatrix:
    """Square sparse matrix in CSR layout.

    Arrays are made read-only on construction; treat instances as immutable.
    """

    n: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        offsets = np.ascontiguousarray(self.row_offsets, dtype=np.int64)
        cols = np.ascontiguousarray(self.col_indices, dtype=np.int64)
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        n = int(self.n)
        if offsets.shape != (n + 1,):
            raise SparseError(f"row_offsets must have length n+1={n + 1}")
        if offsets[0] != 0 or offsets[-1] != vals.shape[0] or np.any(np.diff(offsets) < 0):
            raise SparseError("row_offsets must be nondecreasing from 0 to nnz")
        if cols.shape != vals.shape:
            raise SparseError("col_indices and values differ in length")
        if cols.size and (cols.min() < 0 or cols.max() >= n):
            raise SparseError("column index out of range")
        for i in range(n):
            seg = cols[offsets[i]:offsets[i + 1]]
            if seg.size > 1 and np.any(np.diff(seg) <= 0):
                raise SparseError(f"row {i}: column indices not strictly increasing")
        for arr in (offsets, cols, vals):
            arr.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "row_offsets", offsets)
        object.__setattr__(self, "col_indices", cols)
        object.__setattr__(self, "values", vals)

    @property
    def nnz(self):
        return self.values.shape[0]

    def row_indices(self):
        return np.repeat(np.arange(self.n), np.diff(self.row_offsets))

    def diagonal(self):
        d = np.zeros(self.n)
        rows = self.row_indices()
        on_diag = rows == self.col_indices
        d[rows[on_diag]] = self.values[on_diag]
        return d

    def is_diagonal(self):
        return bool(np.all(self.row_indices() == self.col_indices))

    def to_dense(self):
        A = np.zeros((self.n, self.n))
        A[self.row_indices(), self.col_indices] = self.values
        return A

    def __matmul__(self, x):
        return spmv(self, x)

    @classmethod
    def from_dense(cls, A, keep_zeros=False):
        A = np.asarray(A, dtype=np.float64)
        rows, cols = np.nonzero(A) if not keep_zeros else np.indices(A.shape).reshape(2, -1)
        return csr_from_triplets(zip(rows, cols, A[rows, cols]), A.shape[0], keep_zeros=keep_zeros)

    @classmethod
    def identity(cls, n):
        return cls.diag(np.ones(n))

    @classmethod
    def diag(cls, d):
        d = np.asarray(d, dtype=np.float64)
        n = d.shape[0]
        return cls(n, np.arange(n + 1), np.arange(n), d)


@dataclass(frozen=True, eq=False)
class DiagInverse:
    """Reciprocal of a positive diagonal (lumped) mass matrix."""

    n: int
    inv_values: np.ndarray

    def apply(self, x):
        return self.inv_values * x


def csr_from_triplets(entries, n, keep_zeros=False):
    """Assemble a CSR matrix from ``(row, col, value)`` triplets.

    Duplicate positions are summed.  Positions whose summed value is exactly
    zero are dropped unless ``keep_zeros`` is set.
    """
    n = int(n)
    trip = list(entries)
    if trip:
        rows = np.array([t[0] for t in trip], dtype=np.int64)
        cols = np.array([t[1] for t in trip], dtype=np.int64)
        vals = np.array([t[2] for t in trip], dtype=np.float64)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0)
    return csr_from_arrays(rows, cols, vals, n, keep_zeros=keep_zeros)


def csr_from_arrays(rows, cols, vals, n, keep_zeros=False):
    """Array-based variant of :func:`csr_from_triplets`."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)
    if rows.size:
        bad = (rows < 0) | (rows >= n) | (cols < 0) | (cols >= n)
        if np.any(bad):
            k = int(np.argmax(bad))
            raise SparseError(f"entry ({rows[k]}, {cols[k]}) out of range for n={n}")
    key = rows * n + cols
    # stable sort keeps duplicate summation in input order
    order = np.argsort(key, kind="stable")
    key, vals = key[order], vals[order]
    uniq, first = np.unique(key, return_index=True)
    summed = np.add.reduceat(vals, first) if vals.size else vals
    if not keep_zeros:
        keep = summed != 0.0
        uniq, summed = uniq[keep], summed[keep]
    r = uniq // n
    c = uniq % n
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(r, minlength=n), out=offsets[1:])
    return CsrMatrix(n, offsets, c, summed)


def spmv(A, x):
    """``A @ x`` with a fixed left-to-right summation order inside each row."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (A.n,):
        raise SparseError(f"vector length {x.shape} does not match matrix dimension {A.n}")
    return kernels.spmv(A.row_offsets, A.col_indices, A.values, x)


def check_symmetric(A, tol=0.0):
    """True iff ``|A[i,j] - A[j,i]| <= tol`` over every stored position."""
    rows = A.row_indices()
    cols = A.col_indices
    n = A.n
    fwd = rows * n + cols
    bwd = cols * n + rows
    # fwd is sorted (row-major CSR), so transposed entries can be looked up by bisection
    pos = np.searchsorted(fwd, bwd)
    pos_c = np.minimum(pos, max(len(fwd) - 1, 0))
    found = (pos < len(fwd)) & (fwd[pos_c] == bwd) if len(fwd) else np.zeros(0, bool)
    mirror = np.where(found, A.values[pos_c] if len(fwd) else 0.0, 0.0)
    return bool(np.all(np.abs(A.values - mirror) <= tol))


def diag_inverse(M):
    """Invert a lumped (diagonal, positive) mass matrix."""
    if not M.is_diagonal():
        rows = M.row_indices()
        k = int(np.argmax(rows != M.col_indices))
        raise SparseError(
            f"mass matrix not lumped: off-diagonal entry at ({rows[k]}, {M.col_indices[k]})")
    d = M.diagonal()
    if M.nnz < M.n or np.any(~(d > 0.0)) or not np.all(np.isfinite(d)):
        raise SparseError("mass matrix not positive definite")
    return DiagInverse(M.n, 1.0 / d)
