"""Spectral tools for LPPL bubble models with Ornstein-Uhlenbeck noise."""

from lpplfreq.errors import DataError, DegenerateInputError
from lpplfreq.timeseries import (
    LinearTrend,
    PriceSeries,
    linear_detrend,
    load_csv,
    to_log_series,
    write_csv,
)
from lpplfreq.lppl import FmBand, LpplParams, fm_band, lppl_eval, lppl_series, normalized_power_law
from lpplfreq.ou import (
    OuParams,
    ou_psd_continuous,
    ou_psd_discrete,
    ou_psd_wiener_limit,
    ou_simulate,
)
from lpplfreq.spectra import Spectrum, amplitude_spectrum, power_spectrum, reflect
from lpplfreq.estimators import (
    BandScheme,
    NoiseEstimate,
    mle_from_levels,
    mle_from_prices,
    pessimistic_sigma,
    reconstruct_nu0,
)
from lpplfreq.denoise import (
    FilterSpec,
    cutoff_filter,
    estimate_signal_power,
    find_cutoff,
    snr,
    wiener_filter,
)

__all__ = [
    "BandScheme",
    "DataError",
    "DegenerateInputError",
    "FilterSpec",
    "FmBand",
    "LinearTrend",
    "LpplParams",
    "NoiseEstimate",
    "OuParams",
    "PriceSeries",
    "Spectrum",
    "amplitude_spectrum",
    "cutoff_filter",
    "estimate_signal_power",
    "find_cutoff",
    "fm_band",
    "linear_detrend",
    "load_csv",
    "lppl_eval",
    "lppl_series",
    "mle_from_levels",
    "mle_from_prices",
    "normalized_power_law",
    "ou_psd_continuous",
    "ou_psd_discrete",
    "ou_psd_wiener_limit",
    "ou_simulate",
    "pessimistic_sigma",
    "power_spectrum",
    "reconstruct_nu0",
    "reflect",
    "snr",
    "to_log_series",
    "wiener_filter",
    "write_csv",
]
