"""Log-periodic power law trajectories and their spectral landmarks."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

_JSON_KEYS = {"A": "A", "B": "B", "C": "C", "m": "m", "omega": "omega", "phi": "phi", "T": "T", "n": "n"}


@dataclass(frozen=True)
class LpplParams:
    """Constants of ``l(t) = A - B (T - t)^m (1 + C cos(omega ln(T - t) + phi))``.

    ``m = 0`` is accepted only to study pure log-periodicity; ``pure_log_periodic``
    lets power-law operations reject it. ``n`` is the sampled horizon and must
    satisfy ``T > n - 1`` so every sample precedes the critical time.
    """

    A: float
    B: float
    C: float
    m: float
    omega: float
    phi: float
    T: float
    n: int

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.A, self.B, self.C, self.m, self.omega, self.phi, self.T)):
            raise ValueError("LPPL parameters must be finite")
        if self.B < 0:
            raise ValueError(f"B must be >= 0, got {self.B}")
        if not 0.0 <= self.m <= 1.0:
            raise ValueError(f"m must lie in [0, 1], got {self.m}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not self.T > self.n - 1:
            raise ValueError(f"critical time T={self.T} must exceed the last sample t={self.n - 1}")

    @property
    def pure_log_periodic(self) -> bool:
        return self.m == 0.0

    def to_dict(self) -> dict:
        return {_JSON_KEYS[k]: v for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d: dict) -> "LpplParams":
        missing = set(_JSON_KEYS) - set(d)
        extra = set(d) - set(_JSON_KEYS)
        if missing or extra:
            raise ValueError(f"LPPL JSON keys: missing {sorted(missing)}, unexpected {sorted(extra)}")
        return cls(**{k: d[k] for k in _JSON_KEYS})


@dataclass(frozen=True)
class FmBand:
    f_min: float
    f_max: float
    clipped: bool = False


def lppl_eval(p: LpplParams, t):
    """Evaluate the LPPL log-price at time ``t`` (scalar or array), requiring ``t < T``."""
    scalar = np.ndim(t) == 0
    # scalars go through the array kernel too, so both paths round identically
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr >= p.T):
        raise ValueError(f"LPPL undefined at t >= T = {p.T}")
    dt = p.T - t_arr
    value = p.A - p.B * dt**p.m * (1.0 + p.C * np.cos(p.omega * np.log(dt) + p.phi))
    return float(value[0]) if scalar else value


def lppl_series(p: LpplParams) -> np.ndarray:
    return lppl_eval(p, np.arange(p.n, dtype=float))


def normalized_power_law(m: float, T: float, n: int | None = None) -> LpplParams:
    """Power law rescaled so that ``l(0) = 0`` and its integral over ``[0, T]`` is 1/2.

    Parameters
    ----------
    m : float
        Exponent in ``(0, 1]``. The normalisation diverges at ``m = 0``.
    T : float
        Critical time.
    n : int, optional
        Horizon; defaults to ``ceil(T)``, the ``T = n`` setting of the
        power-law spectral study.
    """
    if not 0.0 < m <= 1.0:
        raise ValueError(f"normalized power law needs 0 < m <= 1, got {m}")
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    B = (1.0 + 1.0 / m) / (2.0 * T) / T**m
    # take A from B the way lppl_eval forms the power term, so l(0) is exactly 0
    A = float(B * ((T - np.zeros(1)) ** m)[0])
    return LpplParams(A=A, B=B, C=0.0, m=m, omega=0.0, phi=0.0, T=T, n=math.ceil(T) if n is None else n)


def fm_band(p: LpplParams) -> FmBand:
    """Frequency band (cycles/step) swept by the log-periodic oscillation over ``[0, n]``.

    The instantaneous frequency of ``cos(omega ln(T - t) + phi)`` is
    ``omega / (2 pi (T - t))``, so the band runs from ``t = 0`` to ``t = n``.
    An upper edge above Nyquist is clipped to 1/2 with a warning.
    """
    if not p.omega > 0:
        raise ValueError(f"FM band needs omega > 0, got {p.omega}")
    if not p.T > p.n:
        raise ValueError(f"FM band needs T > n, got T={p.T}, n={p.n}")
    f_min = p.omega / (2.0 * math.pi * p.T)
    f_max = p.omega / (2.0 * math.pi * (p.T - p.n))
    clipped = False
    if f_max > 0.5:
        warnings.warn(f"upper FM frequency {f_max:.4g} exceeds Nyquist; clipped to 0.5", stacklevel=2)
        f_max, clipped = 0.5, True
    if not f_min < f_max:
        raise ValueError("FM band is empty after clipping")
    return FmBand(f_min, f_max, clipped)
