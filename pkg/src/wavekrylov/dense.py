"""Dense symmetric and symmetric-definite eigensolvers.

Small problems (the projected Krylov pencils) go through a cyclic Jacobi
kernel.  Above ``JACOBI_MAX_N`` the standard problem is handed to LAPACK
(``numpy.linalg.eigh``); this only happens for the desk-scale reference
oracle, where Jacobi's O(n^3)-per-sweep cost with rotation-by-rotation updates
would dominate test time.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from . import kernels

JACOBI_MAX_N = 400
MAX_SWEEPS = 60


class DenseEigError(ArithmeticError):
    pass


class NotPositiveDefinite(DenseEigError):
    def __init__(self, pivot):
        super().__init__(f"matrix not positive definite (pivot {pivot})")
        self.pivot = pivot


@dataclass(frozen=True, eq=False)
class DenseSym:
    """Symmetric dense matrix; the input is symmetrized as ``(A + A.T) / 2``."""

    values: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.values, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"square matrix required, got shape {A.shape}")
        A = np.asfortranarray(0.5 * (A + A.T))
        A.setflags(write=False)
        object.__setattr__(self, "values", A)

    @property
    def n(self):
        return self.values.shape[0]


def _as_array(A):
    return A.values if isinstance(A, DenseSym) else DenseSym(A).values


def cholesky(A):
    """Lower-triangular ``L`` with ``L @ L.T == A``.

    Raises NotPositiveDefinite carrying the failing pivot index.
    """
    A = _as_array(A)
    L, info = kernels.cholesky(np.ascontiguousarray(A))
    if info >= 0:
        raise NotPositiveDefinite(int(info))
    return L


def sym_eig(A, method="auto"):
    """Eigen-decomposition of a symmetric matrix.

    Returns ``(w, V)`` with ``w`` ascending and ``V`` orthonormal.  ``method``
    is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    ``JACOBI_MAX_N``).
    """
    A = _as_array(A)
    n = A.shape[0]
    if n < 1:
        raise ValueError("empty matrix")
    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_N else "lapack"
    if method == "lapack":
        w, V = np.linalg.eigh(A)
        return w, V
    if method != "jacobi":
        raise ValueError(f"unknown method {method!r}")
    work = np.array(A, order="C")
    V = np.eye(n)
    sweeps = kernels.jacobi(work, V, MAX_SWEEPS)
    if sweeps < 0:
        raise DenseEigError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    w = np.diag(work).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def generalized_sym_eig(S, M, method="auto"):
    """Solve ``S v = lam M v`` for symmetric ``S`` and positive definite ``M``.

    Cholesky reduction: ``M = L L^T``, eigen-solve ``L^-1 S L^-T``, then map
    eigenvectors back with ``L^-T``.  Eigenvectors come out M-orthonormal.
    """
    S = _as_array(S)
    M = _as_array(M)
    L = cholesky(M)
    X = solve_triangular(L, S, lower=True)
    A = solve_triangular(L, X.T, lower=True)
    w, W = sym_eig(DenseSym(A), method=method)
    V = solve_triangular(L.T, W, lower=False)
    return w, V
