"""Hot numeric kernels, each in a numba loop flavor and a numpy flavor.

The public names at the bottom (``spmv``, ``filtered_apply``, ...) dispatch to
whichever flavor ``_accel`` selected.  Both flavors are importable directly as
``<name>_numba`` / ``<name>_numpy`` so tests and benchmarks can compare them;
``<name>_numba`` is ``None`` when numba is disabled.
"""
import numpy as np

from ._accel import njit, pick

# --------------------------------------------------------------------------
# CSR matrix-vector product


def _spmv_loop(offsets, cols, vals, x):
    n = offsets.shape[0] - 1
    y = np.empty(n)
    for i in range(n):
        acc = 0.0
        for k in range(offsets[i], offsets[i + 1]):
            acc += vals[k] * x[cols[k]]
        y[i] = acc
    return y


def spmv_numpy(offsets, cols, vals, x):
    # walk column slot k of every row at once: same left-to-right order as the loop
    n = offsets.shape[0] - 1
    y = np.zeros(n)
    starts = offsets[:-1]
    lens = offsets[1:] - starts
    for k in range(int(lens.max()) if n else 0):
        rows = np.flatnonzero(lens > k)
        idx = starts[rows] + k
        y[rows] += vals[idx] * x[cols[idx]]
    return y


spmv_numba = njit(_spmv_loop)

# --------------------------------------------------------------------------
# Filtered operator: sum_l tau*alpha_l*y_l with leapfrog states y_l


def _filtered_apply_loop(offsets, cols, vals, minv, r, tau, alpha):
    n = r.shape[0]
    nsteps = alpha.shape[0]
    tau2 = tau * tau
    w0 = tau * alpha[0]
    acc = np.empty(n)
    y0 = np.empty(n)
    y1 = np.empty(n)
    for i in range(n):
        acc[i] = w0 * r[i]
        y0[i] = r[i]
        y1[i] = r[i]
    y2 = np.empty(n)
    for ell in range(1, nsteps):
        w = tau * alpha[ell]
        for i in range(n):
            s = 0.0
            for k in range(offsets[i], offsets[i + 1]):
                s += vals[k] * y1[cols[k]]
            y2[i] = -tau2 * (minv[i] * s) + 2.0 * y1[i] - y0[i]
        for i in range(n):
            acc[i] += w * y2[i]
        tmp = y0
        y0 = y1
        y1 = y2
        y2 = tmp
    return acc


def filtered_apply_numpy(offsets, cols, vals, minv, r, tau, alpha):
    tau2 = tau * tau
    acc = (tau * alpha[0]) * r
    y0 = r.copy()
    y1 = r.copy()
    for ell in range(1, alpha.shape[0]):
        y2 = -tau2 * (minv * spmv_numpy(offsets, cols, vals, y1)) + 2.0 * y1 - y0
        acc += (tau * alpha[ell]) * y2
        y0, y1 = y1, y2
    return acc


filtered_apply_numba = njit(_filtered_apply_loop)

# --------------------------------------------------------------------------
# Scalar amplification recurrence q_l(omega) and the discrete filter sum


def _scalar_q_loop(omega, tau, nsteps):
    q = np.empty(nsteps)
    a = 2.0 - tau * tau * omega * omega
    prev = 1.0
    cur = 1.0
    for ell in range(nsteps):
        q[ell] = cur
        nxt = a * cur - prev
        prev = cur
        cur = nxt
    return q


def scalar_q_numpy(omega, tau, nsteps):
    # the recurrence is inherently sequential; plain python loop
    q = np.empty(nsteps)
    a = 2.0 - tau * tau * omega * omega
    prev = 1.0
    cur = 1.0
    for ell in range(nsteps):
        q[ell] = cur
        prev, cur = cur, a * cur - prev
    return q


scalar_q_numba = njit(_scalar_q_loop)


def _filter_sum_loop(omegas, tau, alpha):
    m = omegas.shape[0]
    out = np.empty(m)
    for j in range(m):
        a = 2.0 - tau * tau * omegas[j] * omegas[j]
        prev = 1.0
        cur = 1.0
        acc = 0.0
        for ell in range(alpha.shape[0]):
            acc += (tau * alpha[ell]) * cur
            nxt = a * cur - prev
            prev = cur
            cur = nxt
        out[j] = acc
    return out


def filter_sum_numpy(omegas, tau, alpha):
    a = 2.0 - tau * tau * omegas * omegas
    prev = np.ones_like(omegas)
    cur = np.ones_like(omegas)
    acc = np.zeros_like(omegas)
    with np.errstate(over="ignore", invalid="ignore"):
        for ell in range(alpha.shape[0]):
            acc += (tau * alpha[ell]) * cur
            prev, cur = cur, a * cur - prev
    return acc


filter_sum_numba = njit(_filter_sum_loop)

# --------------------------------------------------------------------------
# Dense Cholesky; returns (L, info) with info = -1 on success, else pivot index


def _cholesky_loop(A):
    n = A.shape[0]
    L = np.zeros((n, n))
    for j in range(n):
        s = A[j, j]
        for k in range(j):
            s -= L[j, k] * L[j, k]
        if not (s > 0.0) or not np.isfinite(s):
            return L, j
        d = np.sqrt(s)
        L[j, j] = d
        for i in range(j + 1, n):
            t = A[i, j]
            for k in range(j):
                t -= L[i, k] * L[j, k]
            L[i, j] = t / d
    return L, -1


def cholesky_numpy(A):
    n = A.shape[0]
    L = np.zeros((n, n))
    for j in range(n):
        s = A[j, j] - L[j, :j] @ L[j, :j]
        if not (s > 0.0) or not np.isfinite(s):
            return L, j
        d = np.sqrt(s)
        L[j, j] = d
        L[j + 1:, j] = (A[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / d
    return L, -1


cholesky_numba = njit(_cholesky_loop)

# --------------------------------------------------------------------------
# Cyclic Jacobi for dense symmetric matrices.  A is overwritten (its diagonal
# ends up holding the eigenvalues), V accumulates the rotations.  Returns the
# number of sweeps used, or -1 if max_sweeps was exhausted.

_EPS = 2.220446049250313e-16


def _rotation(app, aqq, apq):
    theta = (aqq - app) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        sgn = 1.0 if theta >= 0.0 else -1.0
        t = sgn / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    return c, t * c


def _jacobi_loop(A, V, max_sweeps):
    n = A.shape[0]
    norm = 0.0
    for i in range(n):
        for j in range(n):
            norm += A[i, j] * A[i, j]
    floor = 1e-18 * np.sqrt(norm)
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                app = A[p, p]
                aqq = A[q, q]
                if abs(apq) <= floor or abs(apq) <= _EPS * np.sqrt(abs(app * aqq)):
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    continue
                rotated = True
                c, s = _rotation(app, aqq, apq)
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq
        if not rotated:
            return sweep
    return -1


def jacobi_numpy(A, V, max_sweeps):
    n = A.shape[0]
    floor = 1e-18 * np.linalg.norm(A)
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                app = A[p, p]
                aqq = A[q, q]
                if abs(apq) <= floor or abs(apq) <= _EPS * np.sqrt(abs(app * aqq)):
                    A[p, q] = A[q, p] = 0.0
                    continue
                rotated = True
                c, s = _rotation(app, aqq, apq)
                colp = A[:, p].copy()
                colq = A[:, q]
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :]
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
        if not rotated:
            return sweep
    return -1


_rotation_jit = njit(_rotation)
if _rotation_jit is not None:
    _rotation = _rotation_jit
jacobi_numba = njit(_jacobi_loop)

# --------------------------------------------------------------------------

spmv = pick(spmv_numba, spmv_numpy)
filtered_apply = pick(filtered_apply_numba, filtered_apply_numpy)
scalar_q = pick(scalar_q_numba, scalar_q_numpy)
filter_sum = pick(filter_sum_numba, filter_sum_numpy)
cholesky = pick(cholesky_numba, cholesky_numpy)
jacobi = pick(jacobi_numba, jacobi_numpy)
