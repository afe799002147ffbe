"""Krylov eigensolver driven by filtered leapfrog solutions.

Each Krylov vector is ``C r`` where ``C r = sum_l tau alpha(l tau) y_l(r)`` and
``y_l(r)`` are leapfrog states started at rest from ``r``.  The pencil is
projected onto the growing orthonormal basis and Ritz pairs are accepted by
their residual in the full space.
"""
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .dense import DenseSym, NotPositiveDefinite, generalized_sym_eig
from .filters import FilterSpec, _filter_values
from .sparse import SparseError, spmv
from .stepper import estimate_max_omega

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    pass


class TimeSteppingDiverged(SolverError):
    def __init__(self, detail=""):
        super().__init__("time stepping diverged" + (f": {detail}" if detail else ""))


class Breakdown(Exception):
    """The new Krylov direction lies (numerically) in the current basis."""

    def __init__(self, norm_before, norm_after):
        super().__init__(f"Krylov breakdown: |r| {norm_before:.3e} -> {norm_after:.3e}")
        self.norm_before = norm_before
        self.norm_after = norm_after


@dataclass
class SolverConfig:
    filter: FilterSpec
    m_max: int = 40
    n_accept_target: int = 1
    residual_tol: float = 1e-5
    seed: int = 0
    reorth_passes: int = 2
    breakdown_tol: float = 1e-12
    check_cfl: bool = True
    power_iters: int = 100

    def __post_init__(self):
        if self.m_max < 1:
            raise SolverError("m_max must be >= 1")
        if not self.residual_tol > 0:
            raise SolverError("residual_tol must be positive")
        if self.reorth_passes < 1:
            raise SolverError("reorth_passes must be >= 1")


class KrylovBasis:
    """Orthonormal columns, stored in a preallocated ``N x capacity`` block."""

    def __init__(self, n, capacity):
        self._store = np.empty((n, max(1, capacity)), order="F")
        self.dim = 0

    @property
    def columns(self):
        return self._store[:, :self.dim]

    @property
    def n(self):
        return self._store.shape[0]

    def append(self, b):
        if self.dim == self._store.shape[1]:
            grown = np.empty((self.n, 2 * self.dim), order="F")
            grown[:, :self.dim] = self.columns
            self._store = grown
        self._store[:, self.dim] = b
        self.dim += 1

    def orthonormality_error(self):
        B = self.columns
        return float(np.abs(B.T @ B - np.eye(self.dim)).max()) if self.dim else 0.0


@dataclass
class RitzPair:
    omega: float
    omega_sq: float
    residual: float
    mu: float
    accepted: bool
    vector_id: int


@dataclass
class RitzReport:
    """Ritz pairs at one Krylov dimension, sorted by ``omega``.

    ``coeffs[:, pair.vector_id]`` holds the projected eigenvector; lift it
    with :meth:`vector`.
    """

    step: int
    pairs: list
    coeffs: np.ndarray = field(repr=False)

    @property
    def accepted(self):
        return [p for p in self.pairs if p.accepted]

    def vector(self, pair, basis):
        """Lifted Ritz vector ``B v``, 2-norm normalized."""
        u = basis.columns[:, :self.step] @ self.coeffs[:, pair.vector_id]
        return u / np.linalg.norm(u)


class ProjectedPencil:
    """Incrementally grown ``B^T S B`` and ``B^T M B``.

    Keeps ``S b_k`` and ``M b_k`` for every basis column so residuals of
    lifted Ritz vectors need no further sparse products.
    """

    def __init__(self, S, mass_diag, n, capacity):
        self.S = S
        self.mass_diag = mass_diag
        cap = max(1, capacity)
        self.SB = np.empty((n, cap), order="F")
        self.MB = np.empty((n, cap), order="F")
        self.Sm = np.zeros((cap, cap))
        self.Mm = np.zeros((cap, cap))
        self.dim = 0

    def _grow(self):
        cap = 2 * self.SB.shape[1]
        for name in ("SB", "MB"):
            old = getattr(self, name)
            new = np.empty((old.shape[0], cap), order="F")
            new[:, :self.dim] = old[:, :self.dim]
            setattr(self, name, new)
        for name in ("Sm", "Mm"):
            old = getattr(self, name)
            new = np.zeros((cap, cap))
            new[:self.dim, :self.dim] = old[:self.dim, :self.dim]
            setattr(self, name, new)

    def extend(self, basis):
        """Add the row/column for the newest basis column."""
        k = self.dim
        if k == self.SB.shape[1]:
            self._grow()
        B = basis.columns[:, :k + 1]
        b = B[:, k]
        sb = spmv(self.S, b)
        mb = self.mass_diag * b
        self.SB[:, k] = sb
        self.MB[:, k] = mb
        srow = B.T @ sb
        mrow = B.T @ mb
        self.Sm[k, :k + 1] = srow
        self.Sm[:k + 1, k] = srow
        self.Mm[k, :k + 1] = mrow
        self.Mm[:k + 1, k] = mrow
        self.dim = k + 1

    @property
    def matrices(self):
        k = self.dim
        return self.Sm[:k, :k], self.Mm[:k, :k]


def apply_filtered_operator(minv, S, spec, r):
    """``sum_{l<L} tau alpha(l tau) y_l(r)`` with leapfrog states from ``y_-1 = y_0 = r``.

    Costs ``L - 1`` sparse products.
    """
    r = np.ascontiguousarray(r, dtype=np.float64)
    if r.shape != (S.n,) or minv.n != S.n:
        raise SparseError("dimension mismatch between vector and pencil")
    with np.errstate(over="ignore", invalid="ignore"):
        out = kernels.filtered_apply(S.row_offsets, S.col_indices, S.values,
                                     minv.inv_values, r, float(spec.tau), spec.alpha_samples)
    if not np.all(np.isfinite(out)):
        raise TimeSteppingDiverged("non-finite values; is tau below the stability limit?")
    return out


def orthonormalize_against(r, basis, reorth_passes=2, breakdown_tol=1e-12):
    """Classical Gram-Schmidt, repeated ``reorth_passes`` times, then normalize.

    Returns ``(b, norm_before)``; raises :class:`Breakdown` when the projected
    norm falls below ``breakdown_tol * norm_before``.
    """
    r = np.array(r, dtype=np.float64)
    norm_before = float(np.linalg.norm(r))
    if basis.dim:
        B = basis.columns
        for _ in range(reorth_passes):
            r -= B @ (B.T @ r)
    norm_after = float(np.linalg.norm(r))
    if norm_before == 0.0 or norm_after < breakdown_tol * norm_before:
        raise Breakdown(norm_before, norm_after)
    return r / norm_after, norm_before


def project_pencil(basis, S, M):
    """Full recomputation of ``(B^T S B, B^T M B)``."""
    if basis.dim < 1:
        raise SolverError("empty basis")
    if basis.n != S.n or M.n != S.n:
        raise SparseError("dimension mismatch between basis and pencil")
    B = basis.columns
    SB = np.column_stack([spmv(S, B[:, j]) for j in range(basis.dim)])
    MB = np.column_stack([spmv(M, B[:, j]) for j in range(basis.dim)])
    return DenseSym(B.T @ SB), DenseSym(B.T @ MB)


def _ritz_from_projection(Sm, Mm, B, SB, MB, spec, residual_tol):
    w, V = generalized_sym_eig(DenseSym(Sm), DenseSym(Mm))
    U = B @ V
    R = SB @ V - (MB @ V) * w
    res = np.linalg.norm(R, axis=0) / np.linalg.norm(U, axis=0)
    omegas = np.sqrt(np.maximum(w, 0.0))
    mus = _filter_values(omegas, spec)
    order = np.argsort(omegas, kind="stable")
    pairs = [RitzPair(float(omegas[j]), float(w[j]), float(res[j]), float(mus[j]),
                      bool(res[j] <= residual_tol), int(j)) for j in order]
    return RitzReport(B.shape[1], pairs, V)


def ritz_step(basis, S, M, config):
    """Rayleigh-Ritz on the current basis with residuals ``|(S - w M) u|_2``, ``|u|_2 = 1``."""
    if basis.dim < 1:
        raise SolverError("empty basis")
    B = basis.columns
    SB = np.column_stack([spmv(S, B[:, j]) for j in range(basis.dim)])
    MB = np.column_stack([spmv(M, B[:, j]) for j in range(basis.dim)])
    return _ritz_from_projection(B.T @ SB, B.T @ MB, B, SB, MB,
                                 config.filter, config.residual_tol)


@dataclass
class SolveResult:
    report: RitzReport
    history: list
    basis: KrylovBasis
    tau: float
    L: int
    spmv_count: int
    spmv_breakdown: dict
    omega_max_estimate: float = None
    stop_reason: str = ""
    warning: str = None
    wall_time: float = 0.0
    projection: ProjectedPencil = field(default=None, repr=False)

    @property
    def accepted(self):
        return self.report.accepted

    @property
    def m_reached(self):
        return self.basis.dim

    def __iter__(self):
        # allows ``report, history, basis = solve(...)``
        return iter((self.report, self.history, self.basis))


def starting_vector(n, seed):
    rng = np.random.default_rng(seed)
    r = rng.uniform(-1.0, 1.0, n)
    return r / np.linalg.norm(r)


def solve(pencil, config, on_step=None):
    """Grow the filtered Krylov space until enough Ritz pairs are accepted.

    Stops when ``n_accept_target`` pairs pass the residual test, on breakdown
    (the basis spans an invariant subspace), or at ``m_max``.  Reaching
    ``m_max`` short of the target is reported via ``warning``, not raised.
    ``on_step(report, basis, projection)`` is called after every step.
    """
    t0 = time.perf_counter()
    S, M = pencil.stiffness, pencil.mass
    minv = pencil.minv
    spec = config.filter
    counts = {"time_stepping": 0, "power_iteration": 0, "projection": 0}
    omega_est = None
    if config.check_cfl:
        omega_est, counts["power_iteration"] = estimate_max_omega(
            minv, S, iters=config.power_iters, seed=config.seed)
        if spec.tau * omega_est >= 2.0:
            raise TimeSteppingDiverged(
                f"tau={spec.tau:.6g} violates stability bound 2/omega_max="
                f"{2.0 / omega_est:.6g}")

    basis = KrylovBasis(pencil.n, config.m_max)
    proj = ProjectedPencil(S, M.diagonal(), pencil.n, config.m_max)
    history = []
    stop = "m_max"

    def extend(b):
        basis.append(b)
        proj.extend(basis)
        counts["projection"] += 1
        Sm, Mm = proj.matrices
        k = basis.dim
        report = _ritz_from_projection(Sm, Mm, basis.columns, proj.SB[:, :k], proj.MB[:, :k],
                                       spec, config.residual_tol)
        history.append(report)
        if on_step is not None:
            on_step(report, basis, proj)
        log.debug("step %d: %d accepted", k, len(report.accepted))
        return report

    report = extend(starting_vector(pencil.n, config.seed))
    while True:
        if len(report.accepted) >= config.n_accept_target:
            stop = "target"
            break
        if basis.dim >= config.m_max:
            break
        r = apply_filtered_operator(minv, S, spec, basis.columns[:, -1])
        counts["time_stepping"] += spec.L - 1
        try:
            b, _ = orthonormalize_against(r, basis, config.reorth_passes, config.breakdown_tol)
        except Breakdown as exc:
            log.info("%s; invariant subspace reached at dim %d", exc, basis.dim)
            stop = "breakdown"
            break
        try:
            report = extend(b)
        except NotPositiveDefinite:
            # projected mass lost definiteness: basis numerically rank deficient
            basis.dim -= 1
            proj.dim -= 1
            stop = "breakdown"
            break

    warning = None
    if len(report.accepted) < config.n_accept_target:
        warning = (f"only {len(report.accepted)} of {config.n_accept_target} requested "
                   f"eigenpairs accepted at m={basis.dim} (stopped: {stop})")
        log.warning(warning)
    return SolveResult(
        report=report, history=history, basis=basis, tau=spec.tau, L=spec.L,
        spmv_count=counts["time_stepping"] + counts["power_iteration"],
        spmv_breakdown=counts, omega_max_estimate=omega_est, stop_reason=stop,
        warning=warning, wall_time=time.perf_counter() - t0, projection=proj)


def auto_filter(pencil, omega_min, omega_max, L, safety=0.95, power_iters=100, seed=0):
    """FilterSpec with ``tau`` chosen from a power-iteration estimate of the top frequency."""
    from .stepper import stable_tau

    est, _ = estimate_max_omega(pencil.minv, pencil.stiffness, iters=power_iters, seed=seed)
    return FilterSpec(omega_min, omega_max, stable_tau(est, safety), L), est
