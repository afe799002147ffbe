"""Benchmark pencils with known spectra, file I/O for pencils, and the dense oracle."""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import mmio
from .dense import generalized_sym_eig
from .sparse import CsrMatrix, check_symmetric, csr_from_arrays, diag_inverse

ORACLE_CAP = 2000
MAX_GRID_NODES = 4_000_000


class ProblemError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Pencil:
    """Stiffness/mass pair ``(S, M)`` with ``M`` diagonal and positive."""

    stiffness: CsrMatrix
    mass: CsrMatrix
    label: str = ""
    analytic_spectrum: np.ndarray = None
    params: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.stiffness.n

    @cached_property
    def minv(self):
        return diag_inverse(self.mass)


def _neumann_1d_parts(n_cells, length):
    if n_cells < 2:
        raise ProblemError("n_cells must be >= 2")
    if not length > 0:
        raise ProblemError("length must be positive")
    h = length / n_cells
    n = n_cells + 1
    inv_h = 1.0 / h
    diag = np.full(n, 2.0 * inv_h)
    diag[0] = diag[-1] = inv_h
    mass = np.full(n, h)
    mass[0] = mass[-1] = 0.5 * h
    k = np.arange(n)
    omegas = 2.0 / h * np.sin(k * np.pi / (2 * n_cells))
    return h, diag, mass, omegas


def _tridiag(diag, off):
    n = diag.shape[0]
    i = np.arange(n)
    rows = np.concatenate([i[1:], i, i[:-1]])
    cols = np.concatenate([i[:-1], i, i[1:]])
    vals = np.concatenate([np.full(n - 1, off), diag, np.full(n - 1, off)])
    return rows, cols, vals


def laplacian_1d_neumann(n_cells, length):
    """Lumped P1 Neumann Laplacian on ``[0, length]`` with ``n_cells`` uniform cells."""
    h, diag, mass, omegas = _neumann_1d_parts(n_cells, length)
    n = diag.shape[0]
    S = csr_from_arrays(*_tridiag(diag, -1.0 / h), n)
    return Pencil(S, CsrMatrix.diag(mass), f"laplacian_1d_neumann(n_cells={n_cells}, length={length})",
                  np.sort(omegas), {"n_cells": n_cells, "length": length})


def laplacian_2d_rect(nx, ny, lx, ly, max_nodes=MAX_GRID_NODES):
    """Neumann Laplacian on ``[0,lx] x [0,ly]``, Kronecker sum of two 1D pencils.

    ``S = Sx (x) My + Mx (x) Sy`` and ``M = Mx (x) My``; node ``(i, j)`` has
    index ``i * (ny + 1) + j``.
    """
    if nx < 2 or ny < 2:
        raise ProblemError("nx and ny must be >= 2")
    if (nx + 1) * (ny + 1) > max_nodes:
        raise ProblemError(f"grid of {(nx + 1) * (ny + 1)} nodes exceeds cap {max_nodes}")
    hx, dx, mx, wx = _neumann_1d_parts(nx, lx)
    hy, dy, my, wy = _neumann_1d_parts(ny, ly)
    px, py = nx + 1, ny + 1
    rx, cx, vx = _tridiag(dx, -1.0 / hx)
    ry, cy, vy = _tridiag(dy, -1.0 / hy)
    j = np.arange(py)
    i = np.arange(px)
    # Sx (x) My: couples (a, j) -> (b, j) with weight sx[a, b] * my[j]
    r1 = (rx[:, None] * py + j[None, :]).ravel()
    c1 = (cx[:, None] * py + j[None, :]).ravel()
    v1 = (vx[:, None] * my[None, :]).ravel()
    # Mx (x) Sy: couples (i, a) -> (i, b) with weight mx[i] * sy[a, b]
    r2 = (i[:, None] * py + ry[None, :]).ravel()
    c2 = (i[:, None] * py + cy[None, :]).ravel()
    v2 = (mx[:, None] * vy[None, :]).ravel()
    n = px * py
    S = csr_from_arrays(np.concatenate([r1, r2]), np.concatenate([c1, c2]),
                        np.concatenate([v1, v2]), n)
    M = CsrMatrix.diag(np.outer(mx, my).ravel())
    spectrum = np.sort(np.sqrt((wx[:, None] ** 2 + wy[None, :] ** 2).ravel()))
    return Pencil(S, M, f"laplacian_2d_rect(nx={nx}, ny={ny}, lx={lx}, ly={ly})", spectrum,
                  {"nx": nx, "ny": ny, "lx": lx, "ly": ly})


def diagonal_pencil(omegas, mass=None):
    """``S = diag(omega^2)``, ``M = diag(mass)`` (identity by default)."""
    omegas = np.asarray(omegas, dtype=np.float64)
    m = np.ones_like(omegas) if mass is None else np.asarray(mass, dtype=np.float64)
    S = CsrMatrix.diag(omegas ** 2 * m)
    return Pencil(S, CsrMatrix.diag(m), "diagonal", np.sort(omegas))


BUILTIN = {
    "laplacian_1d_neumann": laplacian_1d_neumann,
    "laplacian_2d_rect": laplacian_2d_rect,
}


def save_matrix_market(pencil, path_S, path_M):
    mmio.write_mtx(pencil.stiffness, path_S, comment=pencil.label or None)
    mmio.write_mtx(pencil.mass, path_M, comment=pencil.label or None)


def load_matrix_market(path_S, path_M, label=None):
    """Load a pencil; checks S symmetric (1e-12 relative) and M diagonal positive."""
    S, _ = mmio.read_mtx(path_S)
    M, where = mmio.read_mtx(path_M)
    if S.n != M.n:
        raise ProblemError(f"dimension mismatch: S is {S.n}, M is {M.n}")
    scale = np.abs(S.values).max() if S.nnz else 0.0
    if not check_symmetric(S, 1e-12 * scale):
        raise ProblemError(f"{path_S}: stiffness matrix is not symmetric")
    rows = M.row_indices()
    off = rows != M.col_indices
    if off.any():
        k = int(np.argmax(off))
        i, j = int(rows[k]), int(M.col_indices[k])
        line = where.get((i, j), where.get((j, i)))
        raise ProblemError(
            f"{path_M}:{line}: mass matrix not diagonal, entry ({i + 1}, {j + 1})")
    d = M.diagonal()
    if M.nnz < M.n or np.any(~(d > 0)):
        k = int(np.argmax(~(d > 0)))
        raise ProblemError(f"{path_M}: mass matrix entry ({k + 1}, {k + 1}) is not positive")
    return Pencil(S, M, label or f"{path_S} | {path_M}")


def dense_reference_eigs(pencil, cap=ORACLE_CAP):
    """All generalized eigenpairs ``S v = omega^2 M v`` by dense solve.

    Returns ``(omega_sq, V)``: ascending eigenvalues (tiny negatives in
    ``[-1e-10, 0)`` clamped to 0) and M-orthonormal eigenvector columns.
    """
    if pencil.n > cap:
        raise ProblemError(f"pencil dimension {pencil.n} exceeds dense oracle cap {cap}")
    w, V = generalized_sym_eig(pencil.stiffness.to_dense(), pencil.mass.to_dense())
    w = np.where((w < 0) & (w >= -1e-10), 0.0, w)
    return w, V
