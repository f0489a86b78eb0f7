"""Write synthetic stand-in price files for the historical bubbles.

Historical closes are not bundled. Each stand-in is an exponential trend with
Wiener log-noise sized to the corresponding series (length, overall rise,
daily volatility); the LPPL stand-in adds a log-periodic bubble under weak OU
noise. Feed the files to ``lpplfreq analyze --input``.
"""

import argparse
import math
from pathlib import Path

from lpplfreq.experiments import STANDINS, exponential_wiener_prices, lppl_ou_prices
from lpplfreq.lppl import LpplParams
from lpplfreq.ou import OuParams
from lpplfreq.timeseries import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("out", type=Path)
    ap.add_argument("--seed", type=int, required=True)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, spec in STANDINS.items():
        write_csv(args.out / f"{name}.csv", exponential_wiener_prices(spec["n"], spec["drift"], spec["sigma"], args.seed))
    bubble = LpplParams(A=10.0, B=0.008, C=0.4, m=0.7, omega=2 * math.pi, phi=math.pi, T=1040.0, n=1000)
    write_csv(args.out / "lppl_bubble_1000.csv", lppl_ou_prices(bubble, OuParams(5.0, 0.001), args.seed))
    print(f"wrote {len(STANDINS) + 1} files to {args.out}")


if __name__ == "__main__":
    main()
