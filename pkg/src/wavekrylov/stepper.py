"""Leapfrog time stepping for ``M y'' = -S y`` and its scalar amplification factors."""
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .sparse import SparseError, spmv

POWER_SAFETY = 1.01


class StepperError(ValueError):
    pass


@dataclass(frozen=True)
class StepperConfig:
    tau: float
    L: int

    def __post_init__(self):
        if not self.tau > 0:
            raise StepperError("tau must be positive")
        if self.L < 1:
            raise StepperError("L must be at least 1")


@dataclass(frozen=True, eq=False)
class WavePair:
    """Two consecutive leapfrog states ``(y_l, y_{l-1})``."""

    y_curr: np.ndarray
    y_prev: np.ndarray

    def __post_init__(self):
        if np.shape(self.y_curr) != np.shape(self.y_prev):
            raise StepperError("state vectors differ in length")

    @classmethod
    def at_rest(cls, r):
        r = np.asarray(r, dtype=np.float64)
        return cls(r.copy(), r.copy())


def verlet_step(minv, S, state, tau):
    """Advance one leapfrog step: ``y+ = -tau^2 M^-1 S y + 2 y - y-``."""
    y, y_prev = state.y_curr, state.y_prev
    if y.shape != (S.n,) or minv.n != S.n:
        raise StepperError("dimension mismatch between state and pencil")
    y_next = -(tau * tau) * (minv.inv_values * spmv(S, y)) + 2.0 * y - y_prev
    return WavePair(y_next, y)


def scalar_q(omega, tau, L):
    """Amplification factors ``q_0..q_{L-1}`` of a single mode by direct recurrence.

    Past the stability limit the sequence grows geometrically with alternating
    sign.  Once it overflows, the remaining entries are returned as signed
    infinities continuing that alternation rather than the NaNs plain
    ``inf - inf`` arithmetic would produce.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        q = kernels.scalar_q(float(omega), float(tau), int(L))
    bad = ~np.isfinite(q)
    if bad.any():
        k = int(np.argmax(bad))
        if not np.isinf(q[k]):
            k -= 1
        sign = np.sign(q[k])
        tail = np.arange(q.shape[0] - k)
        q[k:] = sign * np.where(tail % 2 == 0, np.inf, -np.inf)
    return q


def scalar_q_closed_form(omega, tau, ell):
    """Closed-form ``q_ell`` for ``0 < tau*omega < 2``.

    With ``cos(theta) = 1 - tau^2 omega^2 / 2`` the recurrence solution is
    ``cos((ell + 1/2) theta) / cos(theta / 2)``.
    """
    x = tau * omega
    if not (omega > 0 and 0 < x < 2):
        raise StepperError("closed form degenerate: need 0 < tau*omega < 2 and omega > 0")
    theta = math.acos(1.0 - 0.5 * x * x)
    # cos(theta/2) = sqrt(1 - x^2/4) without cancellation near theta ~ pi
    return math.cos((ell + 0.5) * theta) / math.sqrt(1.0 - 0.25 * x * x)


def estimate_max_omega(minv, S, iters=100, seed=0, safety=POWER_SAFETY, max_retries=5):
    """Upper estimate of the largest pencil frequency by power iteration.

    Iterates ``D S D`` with ``D = M^{-1/2}`` (symmetric, same spectrum as
    ``M^-1 S``) and returns ``safety * sqrt(rayleigh quotient)``.  Also
    returns the number of sparse products spent, as ``(omega, spmv_count)``.
    """
    if iters < 1:
        raise StepperError("iters must be >= 1")
    if minv.n != S.n:
        raise SparseError("dimension mismatch")
    d = np.sqrt(minv.inv_values)
    count = 0
    for attempt in range(max_retries + 1):
        rng = np.random.default_rng([seed, attempt])
        x = rng.uniform(-1.0, 1.0, S.n)
        x /= np.linalg.norm(x)
        lam = 0.0
        for _ in range(iters):
            z = d * spmv(S, d * x)
            count += 1
            lam = float(x @ z)
            nz = np.linalg.norm(z)
            if nz == 0.0:
                break
            x = z / nz
        else:
            return safety * math.sqrt(max(lam, 0.0)), count
    raise StepperError("power iteration: operator annihilated every starting vector")


def stable_tau(omega_max, safety=0.95):
    """Step size ``safety * 2 / omega_max`` satisfying the leapfrog stability bound."""
    if not omega_max > 0:
        raise StepperError("omega_max must be positive")
    if not 0 < safety < 1:
        raise StepperError("safety must lie in (0, 1)")
    return safety * 2.0 / omega_max
