"""Monte Carlo studies and the end-to-end bubble-analysis pipeline.

Every replicate draws its noise from a seed derived from ``(base seed,
sweep index, replicate index)`` through :class:`numpy.random.SeedSequence`,
so results do not depend on execution order or on ``n_jobs``. Outputs are
written with ``repr`` floats and sorted JSON keys, so re-running a config
reproduces its files byte for byte.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from lpplfreq.denoise import cutoff_filter, find_cutoff
from lpplfreq.errors import DataError, DegenerateInputError
from lpplfreq.estimators import (
    MLE,
    BandScheme,
    NoiseEstimate,
    mle_from_prices,
    noise_spectrum,
    pessimistic_sigma,
)
from lpplfreq.lppl import LpplParams, lppl_series, normalized_power_law
from lpplfreq.ou import OuParams, check_seed, noise_psd, ou_simulate
from lpplfreq.spectra import amplitude_spectrum, frequency_grid, power_spectrum
from lpplfreq.timeseries import PriceSeries, to_log_series, write_csv

log = logging.getLogger(__name__)

# series lengths of the historical bubbles studied; data is not bundled
DATASETS = {
    "djia_1921_1929": ("Dow Jones Industrial Average", "1921-06", "1929-07", 2440),
    "sp500_1985_1987": ("S&P 500", "1985-07", "1987-07", 527),
    "nasdaq_1994_2000": ("NASDAQ Composite", "1994-01", "2000-02", 1555),
    "sp500_2003_2007": ("S&P 500", "2003-07", "2007-06", 1000),
    "gld_2009": ("GLD", "2009-03", "2009-10", 171),
}

PESSIMISTIC_FIGURE_LPPL = LpplParams(A=10.0, B=0.008, C=0.4, m=0.7, omega=2 * math.pi, phi=math.pi, T=26000.0, n=25000)
PESSIMISTIC_FIGURE_OU = OuParams(tau=2000.0, sigma=math.sqrt(1.5e-5))

KINDS = ("tau_sweep", "pessimistic_demo", "analyze_synthetic")


def replicate_seed(base: int, *keys: int) -> int:
    """64-bit seed for one replicate, independent of scheduling."""
    ss = np.random.SeedSequence([check_seed(base), *keys])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _parse_tau(v) -> float:
    if isinstance(v, str) and v.lower() in ("inf", "infinite"):
        return math.inf
    return float(v)


@dataclass
class ExperimentConfig:
    name: str
    kind: str
    n: int = 25000
    replicates: int = 30
    seed: int = 0
    ou: OuParams | None = None
    lppl: LpplParams | None = None
    sweep: dict = field(default_factory=dict)
    alpha: float = 1.0
    outputs: str | None = None
    n_jobs: int = 1
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        check_seed(self.seed)
        for tau in self.sweep.get("tau", []):
            OuParams(_parse_tau(tau), 1.0)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if d.get("ou") is not None:
            d["ou"] = OuParams(_parse_tau(d["ou"]["tau"]), float(d["ou"]["sigma"]))
        if d.get("lppl") is not None:
            d["lppl"] = LpplParams.from_dict(d["lppl"])
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.ou is not None:
            d["ou"] = {"tau": "inf" if self.ou.wiener else self.ou.tau, "sigma": self.ou.sigma}
        if self.lppl is not None:
            d["lppl"] = self.lppl.to_dict()
        return d

    def provenance(self) -> dict:
        """Config as written next to results: settings that can change the output only."""
        d = self.to_dict()
        d.pop("outputs")
        d.pop("n_jobs")
        return d


def _outdir(path) -> Path | None:
    if path is None:
        return None
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def write_table(path, rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        cols = list(rows[0]) if rows else []
        writer.writerow(cols)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in cols])


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _map(fn, jobs, n_jobs: int):
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


# -- tau sweep -------------------------------------------------------------


def _tau_job(job) -> float | None:
    tau, sigma, n, seed = job
    nu = ou_simulate(OuParams(tau, sigma), n, seed)
    try:
        est = mle_from_prices(nu)
    except DegenerateInputError:
        return None
    return est.tau_hat if est.finite else None


def run_tau_sweep(cfg: ExperimentConfig) -> list[dict]:
    """Accuracy of the detrended MLE ``tau_hat`` across true relaxation times.

    One row per swept ``tau``; each aggregates ``cfg.replicates`` pure-OU
    runs of length ``cfg.n``. Non-finite estimates are counted, not averaged.
    """
    taus = [_parse_tau(t) for t in cfg.sweep.get("tau", [])]
    if not taus:
        raise ValueError("tau sweep needs sweep.tau values")
    sigma = cfg.ou.sigma if cfg.ou is not None else 0.2
    jobs = [(tau, sigma, cfg.n, replicate_seed(cfg.seed, j, r)) for j, tau in enumerate(taus) for r in range(cfg.replicates)]
    results = _map(_tau_job, jobs, cfg.n_jobs)

    rows = []
    for j, tau in enumerate(taus):
        est = results[j * cfg.replicates : (j + 1) * cfg.replicates]
        finite = np.sort([e for e in est if e is not None])
        if finite.size:
            q25, med, q75 = (float(v) for v in np.percentile(finite, [25, 50, 75]))
        else:
            q25 = med = q75 = math.nan
        rows.append(
            {
                "tau": tau,
                "replicates": cfg.replicates,
                "n_finite": int(finite.size),
                "n_nonfinite": cfg.replicates - int(finite.size),
                "median_tau_hat": med,
                "q25": q25,
                "q75": q75,
                "iqr": q75 - q25,
                "iqr_over_tau": (q75 - q25) / tau,
            }
        )
    out = _outdir(cfg.outputs)
    if out is not None:
        write_table(out / "table.csv", rows)
        write_json(out / "config.json", cfg.provenance())
    return rows


# -- pessimistic estimate demo ---------------------------------------------


def _pessimistic_job(job):
    lppl, ou, seed, alpha = job
    ell = lppl_series(lppl)
    p = ell + ou_simulate(ou, lppl.n, seed)
    est = pessimistic_sigma(power_spectrum(p), BandScheme(alpha))
    return est.sigma2_hat, tuple(est.diagnostics["binding_band"])


def run_pessimistic_demo(cfg: ExperimentConfig) -> dict:
    """Pessimistic ``sigma^2`` on LPPL plus OU noise, with plot-ready spectra of the first replicate.

    Writes ``table.csv`` (one row per replicate), ``spectra.csv`` (``|L|``,
    ``|P|``, theoretical ``sqrt S`` and ``sqrt S_inf`` at the estimate, all
    on the amplitude scale) and ``summary.json``.
    """
    lppl = cfg.lppl or PESSIMISTIC_FIGURE_LPPL
    ou = cfg.ou or PESSIMISTIC_FIGURE_OU
    seeds = [replicate_seed(cfg.seed, 0, r) for r in range(cfg.replicates)]
    results = _map(_pessimistic_job, [(lppl, ou, s, cfg.alpha) for s in seeds], cfg.n_jobs)
    rows = [
        {"replicate": r, "seed": s, "sigma2_hat": est, "band_h": band[0], "band_k": band[1]}
        for r, (s, (est, band)) in enumerate(zip(seeds, results))
    ]
    est = np.array([row["sigma2_hat"] for row in rows])
    summary = {
        "name": cfg.name,
        "sigma2_true": ou.sigma**2,
        "tau_true": "inf" if ou.wiener else ou.tau,
        "replicates": cfg.replicates,
        "sigma2_hat_mean": float(est.mean()),
        "sigma2_hat_median": float(np.median(est)),
        "sigma2_hat_std": float(est.std(ddof=1)) if len(est) > 1 else 0.0,
        "alpha": cfg.alpha,
    }

    out = _outdir(cfg.outputs)
    if out is not None:
        ell = lppl_series(lppl)
        L = amplitude_spectrum(ell)
        P = power_spectrum(ell + ou_simulate(ou, lppl.n, seeds[0]))
        f = frequency_grid(P.N)
        S = np.sqrt(noise_psd(ou, f) / P.N)
        S_inf = np.sqrt(noise_psd(OuParams(math.inf, math.sqrt(rows[0]["sigma2_hat"])), f) / P.N)
        spectra = [
            {"freq": float(f[i]), "L_amp": float(L.amplitude[i]), "P_amp": float(P.amplitude[i]), "S_amp": float(S[i]), "S_inf_amp": float(S_inf[i])}
            for i in range(len(f))
        ]
        write_table(out / "spectra.csv", spectra)
        write_table(out / "table.csv", rows)
        write_json(out / "summary.json", summary)
        write_json(out / "config.json", cfg.provenance())
    return summary


# -- synthetic stand-ins ----------------------------------------------------


def business_days(n: int, start: dt.date = dt.date(2000, 1, 3)) -> tuple[dt.date, ...]:
    days = []
    d = start
    while len(days) < n:
        if d.weekday() < 5:
            days.append(d)
        d += dt.timedelta(days=1)
    return tuple(days)


def exponential_wiener_prices(n: int, drift: float, sigma: float, seed: int, start_price: float = 100.0) -> PriceSeries:
    """Exponential price trend with Wiener log-noise: ``ln P(t) = ln P0 + drift t + W(t)``."""
    noise = ou_simulate(OuParams(math.inf, sigma), n, seed)
    return PriceSeries(business_days(n), np.exp(math.log(start_price) + drift * np.arange(n) + noise))


def lppl_ou_prices(lppl: LpplParams, ou: OuParams, seed: int) -> PriceSeries:
    return PriceSeries(business_days(lppl.n), np.exp(lppl_series(lppl) + ou_simulate(ou, lppl.n, seed)))


# per-step drift and volatility loosely matching each bubble's overall rise and daily swings
STANDINS = {
    "djia_1921_1929": {"n": 2440, "drift": 1.7 / 2439, "sigma": 0.01},
    "gld_2009": {"n": 171, "drift": 0.15 / 170, "sigma": 0.015},
    "exp_wiener_1000": {"n": 1000, "drift": 1.7 / 2439, "sigma": 0.01},
}


# -- bubble analysis ---------------------------------------------------------


@dataclass
class AnalysisOptions:
    alpha: float = 1.0
    closeness: float = 0.25
    cutoff_noise: str = MLE

    def __post_init__(self):
        BandScheme(self.alpha)
        if not self.closeness > 0:
            raise ValueError("closeness threshold must be positive")
        if self.cutoff_noise not in ("mle", "pessimistic"):
            raise ValueError("cutoff_noise must be 'mle' or 'pessimistic'")


@dataclass
class AnalysisReport:
    summary: dict
    mle: NoiseEstimate
    pessimistic: NoiseEstimate
    cutoff_index: int
    cutoff_found: bool
    cutoff_noise: str
    closeness: float | None
    flags: dict
    files: dict
    options: dict
    filtered: np.ndarray = field(repr=False, default=None)

    def to_json(self) -> dict:
        return {
            "input": self.summary,
            "mle": self.mle.to_json(),
            "pessimistic": self.pessimistic.to_json(),
            "cutoff_index": self.cutoff_index,
            "cutoff_found": self.cutoff_found,
            "cutoff_noise": self.cutoff_noise,
            "closeness": self.closeness,
            "flags": self.flags,
            "files": self.files,
            "options": self.options,
        }


def analyze_bubble(prices: PriceSeries, options: AnalysisOptions | None = None, out=None) -> AnalysisReport:
    """Log-prices, reflected spectrum, both noise estimates, cutoff filter.

    The cutoff is the first bin where price power drops below twice the
    noise power (i.e. estimated signal below noise). Noise comes from the
    maximum-likelihood estimate by default, falling back to the pessimistic
    one when the MLE has no parameters. A failed MLE is recorded, not raised.

    With ``out`` set, writes ``spectrum.csv``, ``noise_mle.csv``,
    ``noise_pessimistic.csv``, ``filtered.csv`` (``date,close``) and
    ``report.json`` there.
    """
    options = options or AnalysisOptions()
    p = to_log_series(prices)
    if len(p) < 32:
        raise DataError(f"analysis needs at least 32 prices, got {len(p)}")

    P = power_spectrum(p)
    pess = pessimistic_sigma(P, BandScheme(options.alpha))
    try:
        mle = mle_from_prices(p)
    except DegenerateInputError as exc:
        mle = NoiseEstimate(MLE, None, None, {"reason": str(exc)})

    noise = {"pessimistic": noise_spectrum(pess, P.N)}
    if mle.tau_hat is not None:
        noise["mle"] = noise_spectrum(mle, P.N)
    source = options.cutoff_noise if options.cutoff_noise in noise else "pessimistic"
    f_tilde, found = find_cutoff(P, noise[source])
    filtered = cutoff_filter(p, f_tilde if found else P.N // 2 + 1)

    closeness = None
    if mle.sigma2_hat is not None and pess.sigma2_hat > 0:
        closeness = abs(mle.sigma2_hat - pess.sigma2_hat) / pess.sigma2_hat
    flags = {
        "mle_finite": mle.finite,
        "mle_available": mle.sigma2_hat is not None,
        "pessimistic_zero": pess.sigma2_hat == 0.0,
        "estimates_close": closeness is not None and closeness <= options.closeness,
        "cutoff_found": found,
    }
    flags["mean_reversion_weak"] = flags["estimates_close"]
    flags["degenerate"] = flags["pessimistic_zero"] or not flags["mle_available"]

    files = {}
    outdir = _outdir(out)
    if outdir is not None:
        files = {
            "spectrum": "spectrum.csv",
            "noise_pessimistic": "noise_pessimistic.csv",
            "filtered": "filtered.csv",
            "report": "report.json",
        }
        P.to_csv(outdir / files["spectrum"])
        noise["pessimistic"].to_csv(outdir / files["noise_pessimistic"])
        if "mle" in noise:
            files["noise_mle"] = "noise_mle.csv"
            noise["mle"].to_csv(outdir / files["noise_mle"])
        write_csv(outdir / files["filtered"], PriceSeries(prices.dates, np.exp(filtered)))

    report = AnalysisReport(
        summary={
            "n": len(p),
            "first_date": prices.dates[0].isoformat(),
            "last_date": prices.dates[-1].isoformat(),
            "first_log_price": float(p[0]),
            "last_log_price": float(p[-1]),
            "N": P.N,
        },
        mle=mle,
        pessimistic=pess,
        cutoff_index=f_tilde,
        cutoff_found=found,
        cutoff_noise=source,
        closeness=closeness,
        flags=flags,
        files=files,
        options=asdict(options),
        filtered=filtered,
    )
    if outdir is not None:
        write_json(outdir / files["report"], report.to_json())
    return report


def run_analyze_synthetic(cfg: ExperimentConfig) -> AnalysisReport:
    """Generate an exponential-plus-Wiener stand-in and run :func:`analyze_bubble` on it.

    ``cfg.options`` takes ``standin`` (a key of ``STANDINS``) or explicit
    ``drift``/``sigma``, plus ``closeness`` and ``cutoff_noise``.
    """
    opts = dict(STANDINS.get(cfg.options.get("standin", "exp_wiener_1000")))
    opts.update({k: cfg.options[k] for k in ("n", "drift", "sigma") if k in cfg.options})
    prices = exponential_wiener_prices(int(opts["n"]), float(opts["drift"]), float(opts["sigma"]), cfg.seed)
    out = _outdir(cfg.outputs)
    if out is not None:
        write_csv(out / "input.csv", prices)
        write_json(out / "config.json", cfg.provenance())
    analysis_opts = AnalysisOptions(
        alpha=cfg.alpha,
        closeness=cfg.options.get("closeness", 0.25),
        cutoff_noise=cfg.options.get("cutoff_noise", MLE),
    )
    return analyze_bubble(prices, analysis_opts, out)


def run_experiment(cfg: ExperimentConfig):
    log.info("experiment config: %s", json.dumps(cfg.to_dict(), sort_keys=True))
    if cfg.kind == "tau_sweep":
        return run_tau_sweep(cfg)
    if cfg.kind == "pessimistic_demo":
        return run_pessimistic_demo(cfg)
    return run_analyze_synthetic(cfg)


# -- signal-to-noise study ---------------------------------------------------


def critical_configuration(
    n: int = 4096, m: float = 0.1, fit_bins: int = 8, gap: float = 1.0
) -> tuple[np.ndarray, float]:
    """Normalized power law ``l_m`` and the Wiener ``sigma^2`` whose spectrum matches it at low frequency.

    The critical time is ``T = n - 1 + gap``; ``gap = 1`` is ``T = n``. The
    high-frequency content of ``l_m`` comes from the cusp at ``T``, so it grows
    sharply as the last sample approaches ``T`` (``gap -> 0``).

    ``sigma^2`` is the geometric-mean ratio ``|L|^2 / S_inf(sigma=1)`` over
    bins ``1..fit_bins``, the least-squares fit in log power.
    """
    if not gap > 0:
        raise ValueError(f"gap must be positive, got {gap}")
    ell = lppl_series(normalized_power_law(m, n - 1 + gap, n))
    L = amplitude_spectrum(ell)
    unit = noise_psd(OuParams(math.inf, 1.0), L.freqs[1 : fit_bins + 1])
    sigma2 = float(np.exp(np.mean(np.log(L.periodogram[1 : fit_bins + 1] / unit))))
    return ell, sigma2
