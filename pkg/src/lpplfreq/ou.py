"""Ornstein-Uhlenbeck noise: exact discrete simulation and closed-form spectra.

Noise parameters are a relaxation time ``tau`` (in steps) and a diffusion
constant ``sigma``. ``tau = math.inf`` is the Wiener (random walk) limit,
simulated directly with unit-variance-scaled increments rather than through
``exp(-1/tau)`` so nothing cancels.

All spectra here are one-sided power spectral densities on ``0 <= f <= 1/2``
in cycles per step.

Random numbers come from ``numpy.random.default_rng(seed)`` (PCG64) and
``Generator.standard_normal``. The first normal draw seeds ``nu(0)``, the next
``n - 1`` drive the recurrence, so a given seed always yields the same stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

SEED_MAX = 2**64 - 1


@dataclass(frozen=True)
class OuParams:
    tau: float
    sigma: float

    def __post_init__(self):
        if not (self.tau > 0):
            raise ValueError(f"tau must be positive or math.inf, got {self.tau}")
        if not (self.sigma >= 0) or not math.isfinite(self.sigma):
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma}")

    @property
    def wiener(self) -> bool:
        return math.isinf(self.tau)

    @property
    def decay(self) -> float:
        """Per-step autoregressive coefficient ``a = exp(-1/tau)``."""
        return 1.0 if self.wiener else math.exp(-1.0 / self.tau)

    @property
    def cutoff_frequency(self) -> float:
        return 0.0 if self.wiener else 1.0 / (2.0 * math.pi * self.tau)

    @property
    def stationary_variance(self) -> float:
        return math.inf if self.wiener else self.sigma**2 * self.tau / 2.0

    @property
    def increment_std(self) -> float:
        """Standard deviation of the innovation term in the one-step recurrence."""
        if self.wiener:
            return self.sigma
        # -expm1(-2/tau) keeps precision when tau is large
        return math.sqrt(self.sigma**2 * self.tau / 2.0 * -math.expm1(-2.0 / self.tau))


def check_seed(seed) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= int(seed) <= SEED_MAX:
        raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return int(seed)


def ou_simulate(
    p: OuParams,
    n: int,
    seed: int,
    stationary_init: bool = True,
    nu0: float | None = None,
) -> np.ndarray:
    """Simulate ``n`` samples of OU noise by the exact one-step recurrence.

    ``nu(t+1) = a nu(t) + s u_t`` with ``a = exp(-1/tau)`` and
    ``s^2 = (sigma^2 tau / 2)(1 - a^2)``. With ``stationary_init`` the start is
    drawn from the stationary law ``N(0, sigma^2 tau / 2)``, otherwise it is 0;
    ``nu0`` overrides both. The Wiener limit has no stationary law and
    always starts from 0 unless ``nu0`` is given.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(check_seed(seed))
    u = rng.standard_normal(n)
    if nu0 is not None:
        start = float(nu0)
    elif stationary_init and not p.wiener:
        start = u[0] * math.sqrt(p.stationary_variance)
    else:
        start = 0.0
    if n == 1:
        return np.array([start])
    a = p.decay
    # lfilter evaluates y[t] = s*x[t] + a*y[t-1], i.e. the recurrence term by term
    rest, _ = lfilter([p.increment_std], [1.0, -a], u[1:], zi=[a * start])
    return np.concatenate(([start], rest))


def ou_psd_discrete(p: OuParams, f):
    """Spectrum of the sampled process, ``(sigma^2 tau/2)(1-a^2)/(1 - 2a cos 2 pi f + a^2)``."""
    if p.wiener:
        raise ValueError("discrete OU spectrum needs finite tau; use ou_psd_wiener_limit")
    f = np.asarray(f, dtype=float)
    a = p.decay
    one_minus_a2 = -math.expm1(-2.0 / p.tau)
    # 1 - 2a cos(w) + a^2 = (1 - a)^2 + 4a sin^2(w/2), accurate near f = 0
    denom = (1.0 - a) ** 2 + 4.0 * a * np.sin(np.pi * f) ** 2
    out = p.sigma**2 * p.tau / 2.0 * one_minus_a2 / denom
    return float(out) if out.ndim == 0 else out


def ou_psd_continuous(p: OuParams, f):
    """Continuous-time spectrum ``sigma^2 tau^2 / (1 + 4 pi^2 tau^2 f^2)``."""
    if p.wiener:
        raise ValueError("continuous OU spectrum needs finite tau")
    f = np.asarray(f, dtype=float)
    out = p.sigma**2 * p.tau**2 / (1.0 + 4.0 * np.pi**2 * p.tau**2 * f**2)
    return float(out) if out.ndim == 0 else out


def ou_psd_wiener_limit(sigma2: float, f):
    """Large-``tau`` limit ``sigma^2 / (2 (1 - cos 2 pi f))``; equals ``sigma^2`` at ``f = 0``."""
    f = np.asarray(f, dtype=float)
    s = np.sin(np.pi * f)
    with np.errstate(divide="ignore", invalid="ignore"):
        # 2 (1 - cos 2 pi f) = 4 sin^2(pi f); the f = 0 branch is masked out
        out = np.where(f == 0.0, sigma2, sigma2 / (4.0 * s * s))
    return float(out) if out.ndim == 0 else out


def noise_psd(p: OuParams, f):
    """Discrete-time spectrum of ``p``, dispatching to the Wiener limit for infinite tau."""
    return ou_psd_wiener_limit(p.sigma**2, f) if p.wiener else ou_psd_discrete(p, f)
