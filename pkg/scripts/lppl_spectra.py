"""Plot-ready spectra of the deterministic LPPL building blocks.

Writes, under OUT:
  ramp.csv          reflected linear ramp (triangle wave)
  power_law.csv     normalized power laws l_m for several m, T = n
  fm.csv            pure log-periodic signal (m = 0) and its m = 0.3 variant, with the FM band edges
  critical.csv      l_0.1 against the Wiener spectrum matched at low frequency
"""

import argparse
import math
from pathlib import Path

import numpy as np

from lpplfreq.experiments import critical_configuration, write_json, write_table
from lpplfreq.lppl import LpplParams, fm_band, lppl_series, normalized_power_law
from lpplfreq.ou import OuParams, noise_psd
from lpplfreq.spectra import amplitude_spectrum, power_spectrum
from lpplfreq.timeseries import linear_detrend


def fm_params(n=25_000, omega=3 * math.pi):
    T = n / (1 - math.exp(-11 * math.pi / omega))
    return LpplParams(A=1.0, B=1.0, C=-1.0, m=0.0, omega=omega, phi=-omega * math.log(T - n), T=T, n=n)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("out", type=Path)
    ap.add_argument("--n", type=int, default=4096)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    ramp = amplitude_spectrum(np.arange(float(args.n)))
    write_table(args.out / "ramp.csv", [{"freq": f, "amplitude": a} for f, a in zip(ramp.freqs, ramp.amplitude)])

    ms = (0.1, 0.3, 0.5, 0.7, 1.0)
    specs = {m: amplitude_spectrum(lppl_series(normalized_power_law(m, float(args.n)))) for m in ms}
    freqs = specs[ms[0]].freqs
    write_table(
        args.out / "power_law.csv",
        [{"freq": f, **{f"m={m}": float(specs[m].amplitude[i]) for m in ms}} for i, f in enumerate(freqs)],
    )

    p = fm_params()
    band = fm_band(p)
    t = np.arange(p.n, dtype=float)
    rows = {}
    for m in (0.0, 0.3):
        y = (p.T - t) ** m * np.cos(p.omega * np.log(p.T - t) + p.phi)
        rows[m] = amplitude_spectrum(linear_detrend(y)[0])
    fm_freqs = rows[0.0].freqs
    write_table(
        args.out / "fm.csv",
        [{"freq": f, "m=0": float(rows[0.0].amplitude[i]), "m=0.3": float(rows[0.3].amplitude[i])} for i, f in enumerate(fm_freqs)],
    )
    write_json(args.out / "fm_band.json", {"f_min": band.f_min, "f_max": band.f_max, "T": p.T, "n": p.n})

    for gap in (1.0, 0.01):
        ell, sigma2 = critical_configuration(n=args.n, gap=gap)
        L = power_spectrum(ell)
        S = np.sqrt(noise_psd(OuParams(math.inf, math.sqrt(sigma2)), L.freqs) / L.N)
        write_table(
            args.out / f"critical_gap{gap:g}.csv",
            [{"freq": f, "L_amp": float(a), "S_inf_amp": float(s)} for f, a, s in zip(L.freqs, L.amplitude, S)],
        )
    print(f"wrote spectra to {args.out}")


if __name__ == "__main__":
    main()
