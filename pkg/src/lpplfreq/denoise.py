"""Signal-to-noise ratio, Wiener filtering and the low-pass cutoff filter.

Both filters act by per-bin gains on the DFT of the reflected series and
return the first ``n`` samples of the inverse transform. Gains are symmetric
in frequency, so the output is real. DC always has gain 1: the log-price
level carries the trend being inspected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lpplfreq.errors import DataError
from lpplfreq.spectra import Spectrum, check_grid, power_spectrum, reflect, reflected_length, unreflect
from lpplfreq.timeseries import as_log_series

WIENER = "wiener"
CUTOFF = "cutoff"


@dataclass(frozen=True, eq=False)
class FilterSpec:
    kind: str
    gains: np.ndarray
    cutoff_index: int | None = None

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=float)
        if gains.ndim != 1 or np.any(gains < 0) or np.any(gains > 1):
            raise DataError("filter gains must be a 1-D array in [0, 1]")
        object.__setattr__(self, "gains", gains)

    @property
    def N(self) -> int:
        return 2 * (len(self.gains) - 1)

    def to_json(self) -> dict:
        return {"kind": self.kind, "cutoff_index": self.cutoff_index, "gains": [float(g) for g in self.gains]}

    @classmethod
    def from_json(cls, d: dict) -> "FilterSpec":
        return cls(d["kind"], np.asarray(d["gains"], dtype=float), d.get("cutoff_index"))


def snr(signal_power: Spectrum, noise_power: Spectrum) -> np.ndarray:
    """Per-bin ratio ``|L(f)|^2 / S(f)``.

    Entry 0 is the DC ratio, dominated by the price level rather than by the
    signal shape; callers normally ignore it. Noise power must be positive on
    every other bin.
    """
    check_grid(signal_power, noise_power)
    if np.any(noise_power.power[1:] <= 0):
        raise DataError("noise power must be positive away from DC")
    with np.errstate(divide="ignore", invalid="ignore"):
        return signal_power.power / noise_power.power


def estimate_signal_power(P: Spectrum, S_hat: Spectrum) -> Spectrum:
    """Signal power implied by ``|P|^2 = |L|^2 + S``, clipped at zero."""
    check_grid(P, S_hat)
    return Spectrum.from_power(np.maximum(P.power - S_hat.power, 0.0), P.N)


def wiener_gains(P: Spectrum, S_hat: Spectrum, signal_power: Spectrum | None = None) -> FilterSpec:
    """Gains ``K = 1 / (1 + 1/R) = |L|^2 / (|L|^2 + S)``.

    ``signal_power`` supplies a known ``|L|^2`` (synthetic studies). Without
    it the signal power is estimated as ``P - S_hat``, and bins where that
    estimate is zero get gain 0.
    """
    check_grid(P, S_hat)
    if signal_power is None:
        signal_power = estimate_signal_power(P, S_hat)
    else:
        check_grid(P, signal_power)
    L2, S = signal_power.power, S_hat.power
    with np.errstate(divide="ignore", invalid="ignore"):
        gains = np.where(L2 > 0, L2 / (L2 + S), 0.0)
    gains[0] = 1.0
    return FilterSpec(WIENER, gains)


def cutoff_gains(N: int, f_tilde: int) -> FilterSpec:
    top = N // 2
    if not 1 <= f_tilde <= top + 1:
        raise DataError(f"cutoff index must lie in [1, {top + 1}], got {f_tilde}")
    gains = np.zeros(top + 1)
    gains[:f_tilde] = 1.0
    return FilterSpec(CUTOFF, gains, int(f_tilde))


def apply_filter(p, spec: FilterSpec) -> np.ndarray:
    p = as_log_series(p, min_length=2)
    n = len(p)
    N = reflected_length(n)
    if spec.N != N:
        raise DataError(f"filter built for N = {spec.N}, series needs N = {N}")
    X = np.fft.rfft(reflect(p))
    return unreflect(np.fft.irfft(spec.gains * X, N), n)


def wiener_filter(p, S_hat: Spectrum, signal_power: Spectrum | None = None) -> np.ndarray:
    """Non-causal Wiener filter of log-prices ``p`` against noise spectrum ``S_hat``."""
    P = power_spectrum(p)
    return apply_filter(p, wiener_gains(P, S_hat, signal_power))


def find_cutoff(P: Spectrum, S_hat: Spectrum) -> tuple[int, bool]:
    """Smallest bin ``i >= 1`` where the estimated signal power falls below the noise.

    With ``|L|^2`` estimated as ``P - S`` the test is ``P < 2 S``. Returns
    ``(index, found)``; when no bin qualifies the Nyquist index is returned
    with ``found = False``.
    """
    check_grid(P, S_hat)
    below = np.flatnonzero(P.power[1:] < 2.0 * S_hat.power[1:])
    if below.size == 0:
        return P.N // 2, False
    return int(below[0]) + 1, True


def cutoff_filter(p, f_tilde: int) -> np.ndarray:
    """Keep bins ``i < f_tilde`` of the reflected series and zero the rest."""
    p = as_log_series(p, min_length=2)
    return apply_filter(p, cutoff_gains(reflected_length(len(p)), f_tilde))
