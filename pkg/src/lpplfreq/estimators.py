"""Noise-parameter estimators: time-domain maximum likelihood and the pessimistic spectral bound.

Maximum likelihood treats the observed levels as an AR(1) sample, with
``a = S_xy / S_xx`` and ``tau = 1 / ln(S_xx / S_xy)``. When prices carry a
slow trend, the levels are rebuilt from first differences of the detrended
series and the unknown start ``nu(0)`` is solved from the no-drift condition
``S_x S_xy = S_y S_xx``.

The pessimistic estimator assumes the Wiener limit and takes the largest
``sigma^2`` whose spectrum stays below the observed periodogram on every
band of a geometric band scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from lpplfreq.errors import DataError, DegenerateInputError
from lpplfreq.ou import OuParams, noise_psd
from lpplfreq.spectra import Spectrum, frequency_grid
from lpplfreq.timeseries import as_log_series, linear_detrend

MLE = "mle"
PESSIMISTIC = "pessimistic"

# relative size below which a detrended series counts as identically zero
_FLAT_TOL = 1e-12
_NU0_DENOM_TOL = 1e-12


@dataclass
class NoiseEstimate:
    """Estimated OU parameters.

    ``tau_hat`` is a positive float, ``math.inf`` (no mean reversion detected,
    the Wiener limit) or ``None`` (no estimate at all). ``sigma2_hat`` is
    ``None`` only together with ``tau_hat is None``.
    """

    method: str
    tau_hat: float | None
    sigma2_hat: float | None
    diagnostics: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return self.tau_hat is not None and math.isfinite(self.tau_hat)

    def ou_params(self) -> OuParams:
        if self.tau_hat is None or self.sigma2_hat is None:
            raise DegenerateInputError(f"{self.method} estimate has no noise parameters")
        return OuParams(self.tau_hat, math.sqrt(self.sigma2_hat))

    def to_json(self) -> dict:
        if self.tau_hat is None:
            tau = "none"
        elif math.isinf(self.tau_hat):
            tau = "infinite"
        else:
            tau = self.tau_hat
        return {
            "method": self.method,
            "tau_hat": tau,
            "sigma2_hat": self.sigma2_hat,
            "diagnostics": _jsonable(self.diagnostics),
        }

    @classmethod
    def from_json(cls, d: dict) -> "NoiseEstimate":
        tau = d["tau_hat"]
        if isinstance(tau, str):
            tau = {"none": None, "infinite": math.inf}[tau]
        return cls(d["method"], tau, d["sigma2_hat"], dict(d.get("diagnostics", {})))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


@dataclass(frozen=True)
class AlphaSums:
    A_x: float
    A_y: float
    A_xy: float
    A_xx: float


@dataclass(frozen=True)
class BandScheme:
    """Geometric bands ``[h_j, k_j]`` with ``h_0 = 1`` and ``k_j = h_{j+1} ~ (1 + alpha) h_j``.

    Endpoints are rounded up and forced to advance by at least one bin; the
    last band is clipped at the Nyquist index. DC is never included.
    """

    alpha: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0) or not math.isfinite(self.alpha):
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    def bands(self, N: int) -> list[tuple[int, int]]:
        top = N // 2
        out = []
        h = 1
        while h <= top:
            k = min(max(math.ceil((1.0 + self.alpha) * h - 1e-9), h + 1), top)
            out.append((h, k))
            if k == top:
                break
            h = k
        return out


def _level_sums(nu: np.ndarray) -> tuple[float, float, float]:
    x, y = nu[:-1], nu[1:]
    return float(x @ x), float(x @ y), float(y @ y)


def mle_from_levels(nu) -> NoiseEstimate:
    """Maximum-likelihood ``(tau, sigma^2)`` from OU levels ``nu(0..n-1)``.

    ``S_xy <= 0`` gives no estimate (``tau_hat is None``). ``S_xy >= S_xx``
    means no detectable mean reversion: ``tau_hat`` is ``inf`` and
    ``sigma2_hat`` is the Wiener-limit value, the mean squared increment.
    """
    nu = as_log_series(nu, min_length=3)
    n = len(nu)
    sxx, sxy, syy = _level_sums(nu)
    diag = {"n": n, "S_xx": sxx, "S_xy": sxy, "S_yy": syy}

    if not sxy > 0:
        diag["reason"] = "S_xy <= 0"
        return NoiseEstimate(MLE, None, None, diag)
    if sxy >= sxx:
        diag["reason"] = "S_xy >= S_xx"
        increments = np.diff(nu)
        return NoiseEstimate(MLE, math.inf, float(increments @ increments) / (n - 1), diag)

    a = sxy / sxx
    log_ratio = math.log(sxx / sxy)
    tau = 1.0 / log_ratio
    resid = syy - 2.0 * a * sxy + a * a * sxx
    # sigma^2 = 2 * resid_var / (tau (1 - a^2)), written with ln(S_xx/S_xy) = 1/tau
    sigma2 = 2.0 * log_ratio / (1.0 - a * a) * resid / (n - 1)
    diag["a_hat"] = a
    return NoiseEstimate(MLE, tau, max(sigma2, 0.0), diag)


def alpha_sums(diffs) -> AlphaSums:
    diffs = as_log_series(diffs, min_length=2)
    alpha = np.concatenate(([0.0], np.cumsum(diffs)))
    prev, nxt = alpha[:-1], alpha[1:]
    return AlphaSums(
        A_x=float(prev.sum()),
        A_y=float(nxt.sum()),
        A_xy=float(nxt @ prev),
        A_xx=float(prev @ prev),
    )


def reconstruct_nu0(diffs) -> float:
    """Solve for the unobserved start ``nu(0)`` given the increments ``nu(t+1) - nu(t)``.

    Writes ``nu(t) = nu(0) + alpha_t`` with ``alpha_t`` the running sum of the
    increments and solves ``S_x S_xy = S_y S_xx``, which is linear in ``nu(0)``.
    """
    diffs = as_log_series(diffs, min_length=2)
    m = len(diffs)  # n - 1
    s = alpha_sums(diffs)
    num = s.A_y * s.A_xx - s.A_x * s.A_xy
    den = m * s.A_xy - m * s.A_xx + s.A_x**2 - s.A_y * s.A_x
    scale = m * (abs(s.A_xy) + abs(s.A_xx)) + s.A_x**2 + abs(s.A_y * s.A_x)
    if scale == 0.0 or abs(den) < _NU0_DENOM_TOL * scale:
        raise DegenerateInputError("nu(0) reconstruction is 0/0 for these increments")
    return num / den


def mle_from_prices(p) -> NoiseEstimate:
    """Maximum-likelihood noise estimate from log-prices.

    Removes a least-squares line, treats the residual's first differences as
    noise increments, rebuilds the levels from :func:`reconstruct_nu0` and runs
    :func:`mle_from_levels`.
    """
    p = as_log_series(p, min_length=4)
    resid, trend = linear_detrend(p)
    scale = max(float(np.max(np.abs(p))), 1.0)
    if float(np.max(np.abs(resid))) <= _FLAT_TOL * scale:
        raise DegenerateInputError("prices are an exact line; no noise to estimate")
    diffs = np.diff(resid)
    nu0 = reconstruct_nu0(diffs)
    levels = nu0 + np.concatenate(([0.0], np.cumsum(diffs)))
    est = mle_from_levels(levels)
    est.diagnostics.update(
        {"detrended": True, "trend_intercept": trend.intercept, "trend_slope": trend.slope, "nu0_hat": nu0}
    )
    return est


def _backward_sum(values: np.ndarray) -> float:
    # sequential accumulation from the highest frequency down, so the small
    # high-frequency terms are added to each other before meeting the large ones
    return float(np.cumsum(values[::-1])[-1])


def band_bounds(P: Spectrum, scheme: BandScheme) -> list[tuple[int, int, float]]:
    """Upper bound on ``sigma^2`` from each band: ``2 sum P(f_i) / sum 1/(1 - cos 2 pi f_i)``."""
    bands = scheme.bands(P.N)
    if not bands:
        raise DataError(f"no frequency bands for N = {P.N}")
    pgram = P.periodogram
    # 1/(1 - cos 2 pi f) = 1/(2 sin^2 pi f)
    weight = np.full_like(P.freqs, np.inf)
    weight[1:] = 1.0 / (2.0 * np.sin(np.pi * P.freqs[1:]) ** 2)
    out = []
    for h, k in bands:
        num = _backward_sum(pgram[h : k + 1])
        den = _backward_sum(weight[h : k + 1])
        out.append((h, k, 2.0 * num / den))
    return out


def pessimistic_sigma(P: Spectrum, scheme: BandScheme | None = None) -> NoiseEstimate:
    """Pessimistic (Wiener-limit) noise estimate from a reflected-series spectrum.

    Parameters
    ----------
    P : Spectrum
        Spectrum of the reflected price series (:func:`lpplfreq.spectra.power_spectrum`).
    scheme : BandScheme, optional
        Band layout; ``alpha = 1`` (octaves) by default.

    Returns
    -------
    NoiseEstimate
        ``tau_hat = inf`` and ``sigma2_hat`` the smallest per-band bound.
        ``diagnostics["binding_band"]`` names the band that set it.
    """
    scheme = scheme or BandScheme()
    bounds = band_bounds(P, scheme)
    j = min(range(len(bounds)), key=lambda i: bounds[i][2])
    h, k, sigma2 = bounds[j]
    diag = {
        "alpha": scheme.alpha,
        "N": P.N,
        "bands_used": len(bounds),
        "binding_band": [h, k],
        "band_bounds": [b[2] for b in bounds],
    }
    return NoiseEstimate(PESSIMISTIC, math.inf, sigma2, diag)


def noise_spectrum(est: NoiseEstimate, N: int) -> Spectrum:
    """Expected noise spectrum on a length-``N`` grid implied by an estimate."""
    return Spectrum.from_psd(noise_psd(est.ou_params(), frequency_grid(N)), N)
