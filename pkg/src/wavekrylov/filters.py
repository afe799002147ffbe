"""Band-pass weight functions and the frequency filters they induce."""
import csv
import math
from dataclasses import dataclass

import numpy as np

from . import kernels


class FilterError(ValueError):
    pass


def weight_alpha(t, omega_min, omega_max, T):
    """Truncated inverse Fourier transform of the indicator of ``[omega_min, omega_max]``.

    ``alpha(0) = 2 (omega_max - omega_min) / pi``; for ``0 < t <= T``
    ``4/(pi t) sin(t (omega_max - omega_min)/2) cos(t (omega_max + omega_min)/2)``;
    zero after ``T``.
    """
    if t < 0:
        raise FilterError("weight is defined for t >= 0 only")
    if t == 0:
        return 2.0 * (omega_max - omega_min) / math.pi
    if t > T:
        return 0.0
    half_width = 0.5 * (omega_max - omega_min)
    center = 0.5 * (omega_max + omega_min)
    return 4.0 / (math.pi * t) * math.sin(t * half_width) * math.cos(t * center)


def _alpha_samples(omega_min, omega_max, tau, L):
    T = L * tau
    return np.array([weight_alpha(ell * tau, omega_min, omega_max, T) for ell in range(L)])


@dataclass(frozen=True, eq=False)
class FilterSpec:
    """Target band, step size and step count, with the weight pre-sampled at ``l * tau``.

    ``alpha_samples`` defaults to the band-pass weight; pass a different array
    (or use :meth:`with_weight`) to plug in another weight with the same
    quadrature nodes.
    """

    omega_min: float
    omega_max: float
    tau: float
    L: int
    alpha_samples: np.ndarray = None

    def __post_init__(self):
        if not 0 <= self.omega_min < self.omega_max:
            raise FilterError("need 0 <= omega_min < omega_max")
        if not self.tau > 0:
            raise FilterError("tau must be positive")
        if int(self.L) != self.L or self.L < 1:
            raise FilterError("L must be a positive integer")
        object.__setattr__(self, "L", int(self.L))
        if self.alpha_samples is None:
            samples = _alpha_samples(self.omega_min, self.omega_max, self.tau, self.L)
        else:
            samples = np.array(self.alpha_samples, dtype=np.float64)
            if samples.shape != (self.L,):
                raise FilterError(f"alpha_samples must have length L={self.L}")
        samples.setflags(write=False)
        object.__setattr__(self, "alpha_samples", samples)

    @property
    def T(self):
        return self.L * self.tau

    @classmethod
    def from_end_time(cls, omega_min, omega_max, tau, T):
        """Build with ``L = round(T / tau)``."""
        return cls(omega_min, omega_max, tau, max(1, int(round(T / tau))))

    def with_weight(self, weight):
        """Same band/step/count with samples ``weight(l * tau)``."""
        samples = np.array([weight(ell * self.tau) for ell in range(self.L)], dtype=np.float64)
        return FilterSpec(self.omega_min, self.omega_max, self.tau, self.L, samples)


def continuous_filter(s, spec, quad_points=20001):
    """``int_0^T alpha(t) cos(t s) dt`` by composite Simpson (reference quality)."""
    if quad_points < 10:
        raise FilterError("quad_points must be >= 10")
    n = quad_points if quad_points % 2 == 1 else quad_points + 1
    t = np.linspace(0.0, spec.T, n)
    w = spec.omega_max - spec.omega_min
    c = spec.omega_max + spec.omega_min
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = 4.0 / (np.pi * t) * np.sin(0.5 * w * t) * np.cos(0.5 * c * t)
    alpha[0] = 2.0 * w / np.pi
    f = alpha * np.cos(s * t)
    h = t[1] - t[0]
    return h / 3.0 * (f[0] + f[-1] + 4.0 * f[1:-1:2].sum() + 2.0 * f[2:-1:2].sum())


def _filter_values(omegas, spec):
    omegas = np.ascontiguousarray(omegas, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        return kernels.filter_sum(omegas, float(spec.tau), spec.alpha_samples)


def discrete_filter(omega, spec):
    """Rectangle-rule filter ``sum_l tau alpha(l tau) q_l(omega)``."""
    if omega < 0:
        raise FilterError("omega must be nonnegative")
    return float(_filter_values(np.array([omega]), spec)[0])


def filter_curve(spec, omegas):
    """Discrete filter on a grid; returns an ``(n, 2)`` array of ``(omega, beta_tilde)``."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=np.float64))
    if omegas.size == 0:
        raise FilterError("empty omega grid")
    if np.any(omegas < 0):
        raise FilterError("omega must be nonnegative")
    return np.column_stack([omegas, _filter_values(omegas, spec)])


def write_filter_csv(curve, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["omega", "beta_tilde"])
        for om, b in curve:
            w.writerow([f"{om:.17g}", f"{b:.17g}"])


def contrast_ratio(spec, band=None, stop=(6.0, 10.0), samples=2001):
    """``max |beta~|`` over ``band`` divided by ``max |beta~|`` over ``stop``."""
    band = band or (spec.omega_min, spec.omega_max)
    inner = filter_curve(spec, np.linspace(band[0], band[1], samples))[:, 1]
    outer = filter_curve(spec, np.linspace(stop[0], stop[1], samples))[:, 1]
    return np.abs(inner).max() / np.abs(outer).max()
