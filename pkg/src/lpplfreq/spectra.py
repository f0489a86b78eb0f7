"""Reflection periodisation and DFT spectra of finite series.

A series ``x(0..n-1)`` is mirrored into ``x(n-1), ..., x(1), x(0), x(1), ..., x(n-2)``,
period ``N = 2(n-1)``, so the periodic extension has no jump at the seam.

Normalisation: ``amplitude[i] = |sum_t y[t] exp(-2 pi j i t / N)| / N`` on
``f_i = i / N``, ``i = 0..N//2``; a constant series has DC amplitude equal to
the constant. ``Spectrum.periodogram`` (``N * power = |X|^2 / N``) is on the
same scale as the power spectral densities in :mod:`lpplfreq.ou`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from lpplfreq.errors import DataError
from lpplfreq.timeseries import as_log_series


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Amplitude and power on the grid ``f_i = i/N``, ``i = 0..N//2``.

    Build from amplitudes (``power`` is then their square) or from power
    values via :meth:`from_power`.
    """

    freqs: np.ndarray
    amplitude: np.ndarray
    N: int
    power: np.ndarray = None

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float)
        amplitude = np.asarray(self.amplitude, dtype=float)
        if freqs.shape != amplitude.shape or freqs.shape != (self.N // 2 + 1,):
            raise DataError(f"spectrum of length {self.N} needs {self.N // 2 + 1} grid points")
        if np.any(amplitude < 0):
            raise DataError("amplitudes must be nonnegative")
        power = amplitude**2 if self.power is None else np.asarray(self.power, dtype=float)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "amplitude", amplitude)
        object.__setattr__(self, "power", power)

    @property
    def periodogram(self) -> np.ndarray:
        return self.N * self.power

    @classmethod
    def from_power(cls, power, N: int) -> "Spectrum":
        power = np.asarray(power, dtype=float)
        if np.any(power < 0):
            raise DataError("power must be nonnegative")
        return cls(frequency_grid(N), np.sqrt(power), N, power)

    @classmethod
    def from_psd(cls, psd, N: int) -> "Spectrum":
        """Expected spectrum of a length-``N`` analysis for a process with density ``psd`` on the grid."""
        return cls.from_power(np.asarray(psd, dtype=float) / N, N)

    def same_grid(self, other: "Spectrum") -> bool:
        return self.N == other.N

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["freq", "amplitude", "power"])
            for f, a, p in zip(self.freqs, self.amplitude, self.power):
                writer.writerow([repr(float(f)), repr(float(a)), repr(float(p))])


def check_grid(*spectra: Spectrum) -> None:
    if len({s.N for s in spectra}) > 1:
        raise DataError(f"spectra on different grids: N = {[s.N for s in spectra]}")


def frequency_grid(N: int) -> np.ndarray:
    return np.arange(N // 2 + 1) / N


def reflected_length(n: int) -> int:
    return 2 * (n - 1)


def reflect(x) -> np.ndarray:
    x = as_log_series(x, min_length=2)
    return np.concatenate((x[::-1], x[1:-1]))


def unreflect(y, n: int) -> np.ndarray:
    """Recover ``x(0..n-1)`` from a length-``2(n-1)`` reflected sequence."""
    return np.asarray(y)[:n][::-1].copy()


def amplitude_spectrum(x, reflected: bool = True) -> Spectrum:
    """DFT amplitude of ``x``, mirrored first unless ``reflected`` is False.

    The unreflected variant analyses ``x`` as if periodic with period ``n``;
    it exists for diagnostics only.
    """
    y = reflect(x) if reflected else as_log_series(x, min_length=2)
    N = len(y)
    # transform around the first sample so a constant series has exactly zero
    # power off DC; the offset only contributes to bin 0
    X = np.fft.rfft(y - y[0])
    X[0] += y[0] * N
    return Spectrum(frequency_grid(N), np.abs(X) / N, N)


def power_spectrum(x) -> Spectrum:
    return amplitude_spectrum(x, reflected=True)
