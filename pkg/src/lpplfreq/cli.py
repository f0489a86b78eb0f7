"""Command-line entry point: ``lpplfreq <command> [flags]``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical degeneracy.
Numeric settings may come from ``--config FILE`` (a JSON object keyed by flag
name, dashes or underscores); flags given on the command line win.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path


from lpplfreq.denoise import cutoff_filter, find_cutoff, wiener_filter
from lpplfreq.errors import DataError, DegenerateInputError
from lpplfreq.estimators import BandScheme, mle_from_prices, noise_spectrum, pessimistic_sigma
from lpplfreq.experiments import (
    AnalysisOptions,
    ExperimentConfig,
    analyze_bubble,
    run_experiment,
    write_json,
)
from lpplfreq.lppl import LpplParams, lppl_series
from lpplfreq.ou import OuParams, ou_simulate
from lpplfreq.spectra import amplitude_spectrum, power_spectrum
from lpplfreq.timeseries import (
    PRICE_HEADER,
    SERIES_HEADER,
    load_csv,
    read_series_csv,
    to_log_series,
    write_series_csv,
)

log = logging.getLogger("lpplfreq")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DEGENERATE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _tau(value: str) -> float:
    if value.lower() in ("inf", "infinite"):
        return math.inf
    return float(value)


def _add_out(p, required=True):
    p.add_argument("--out", required=required, metavar="DIR", help="output directory (created if missing)")


def _add_config(p):
    p.add_argument("--config", metavar="FILE", help="JSON file of flag defaults; command-line flags override it")


def _add_input(p):
    p.add_argument(
        "--input",
        required=True,
        metavar="CSV",
        help="'date,close' price file (log taken) or 't,value' series file (used as is)",
    )


def _add_lppl(p):
    g = p.add_argument_group("LPPL parameters")
    for name, help_ in [
        ("A", "log-price level at the critical time"),
        ("B", "power-law scale (>= 0)"),
        ("C", "log-periodic amplitude"),
        ("m", "power-law exponent in [0, 1]"),
        ("omega", "log-frequency (rad)"),
        ("phi", "phase (rad)"),
        ("T", "critical time in steps (> n - 1)"),
    ]:
        g.add_argument(f"--{name}", type=float, required=False, help=help_)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lpplfreq", description="Frequency-domain LPPL and Ornstein-Uhlenbeck noise tools.")
    parser.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate-ou", help="simulate Ornstein-Uhlenbeck noise to ou.csv")
    p.add_argument("--tau", type=_tau, help="relaxation time in steps, or 'inf' for a Wiener process")
    p.add_argument("--sigma", type=float, help="diffusion constant")
    p.add_argument("--n", type=int, help="number of samples")
    p.add_argument("--seed", type=int, help="PRNG seed (required)")
    p.add_argument("--start-zero", action="store_true", help="start at 0 instead of a stationary draw")
    _add_out(p)
    _add_config(p)

    p = sub.add_parser("simulate-lppl", help="evaluate an LPPL trajectory to lppl.csv")
    _add_lppl(p)
    p.add_argument("--n", type=int, help="number of samples")
    _add_out(p)
    _add_config(p)

    p = sub.add_parser("spectrum", help="DFT amplitude/power of a series to spectrum.csv")
    _add_input(p)
    p.add_argument("--unreflected", action="store_true", help="skip reflection (diagnostics only)")
    _add_out(p)
    _add_config(p)

    p = sub.add_parser("estimate", help="estimate OU noise parameters; prints JSON and writes estimate.json")
    _add_input(p)
    p.add_argument("--method", choices=["mle", "pessimistic"], help="estimator (default pessimistic)")
    p.add_argument("--alpha", type=float, help="band growth factor for the pessimistic estimator (default 1)")
    p.add_argument("--allow-nonfinite", action="store_true", help="exit 0 even when the MLE has no finite tau")
    _add_out(p, required=False)
    _add_config(p)

    p = sub.add_parser("denoise", help="Wiener or cutoff filter of a series to filtered.csv")
    _add_input(p)
    p.add_argument("--filter", choices=["wiener", "cutoff"], help="filter kind (default wiener)")
    p.add_argument("--method", choices=["mle", "pessimistic"], help="noise estimate to filter against (default pessimistic)")
    p.add_argument("--tau", type=_tau, help="known noise tau (with --sigma) instead of estimating")
    p.add_argument("--sigma", type=float, help="known noise sigma (with --tau)")
    p.add_argument("--alpha", type=float, help="band growth factor for the pessimistic estimator (default 1)")
    p.add_argument("--cutoff-index", type=int, help="explicit cutoff bin for --filter cutoff")
    _add_out(p)
    _add_config(p)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment described by a JSON config")
    p.add_argument("--config", required=True, metavar="FILE", help="experiment config JSON")
    p.add_argument("--seed", type=int, help="override the config's base seed")
    _add_out(p, required=False)

    p = sub.add_parser("analyze", help="full bubble analysis of a price CSV")
    _add_input(p)
    p.add_argument("--alpha", type=float, help="band growth factor for the pessimistic estimator (default 1)")
    p.add_argument("--closeness", type=float, help="relative gap under which the two estimates count as close (default 0.25)")
    p.add_argument("--cutoff-noise", choices=["mle", "pessimistic"], help="noise estimate defining the cutoff (default mle)")
    _add_out(p)
    _add_config(p)
    return parser


def _resolve(args, defaults: dict) -> dict:
    """Merge defaults < config file < command-line flags."""
    cfg = dict(defaults)
    path = getattr(args, "config", None)
    if path and args.command != "experiment":
        try:
            from_file = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read config {path}: {exc}") from exc
        for k, v in from_file.items():
            key = k.replace("-", "_")
            if key not in vars(args):
                raise UsageError(f"unknown key {k!r} in {path}")
            cfg[key] = v
    for k, v in vars(args).items():
        if v is not None and v is not False:
            cfg[k] = v
    cfg.pop("config", None)
    cfg.pop("quiet", None)
    log.info("resolved config: %s", json.dumps(cfg, sort_keys=True, default=repr))
    return cfg


def _require(cfg: dict, *names):
    missing = [n for n in names if cfg.get(n) is None]
    if missing:
        raise UsageError("missing required flag(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _read_input(path):
    """Log-price series from a price CSV, or a raw series CSV, keyed on its header."""
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    header = [h.strip() for h in header]
    if header == PRICE_HEADER:
        prices = load_csv(path)
        return to_log_series(prices), prices
    if header == SERIES_HEADER:
        return read_series_csv(path), None
    raise DataError(f"{path}:1: unrecognised header {header!r}")


def _outdir(cfg) -> Path | None:
    if cfg.get("out") is None:
        return None
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _jsonable_cfg(cfg: dict) -> dict:
    return {k: ("inf" if isinstance(v, float) and math.isinf(v) else v) for k, v in cfg.items() if k not in ("out", "command")}


def cmd_simulate_ou(args) -> int:
    cfg = _resolve(args, {})
    _require(cfg, "tau", "sigma", "n", "seed")
    tau = _tau(str(cfg["tau"]))
    nu = ou_simulate(OuParams(tau, float(cfg["sigma"])), int(cfg["n"]), int(cfg["seed"]), stationary_init=not cfg.get("start_zero"))
    out = _outdir(cfg)
    write_series_csv(out / "ou.csv", nu)
    write_json(out / "run.json", {"command": "simulate-ou", "config": _jsonable_cfg(cfg)})
    return EXIT_OK


def cmd_simulate_lppl(args) -> int:
    cfg = _resolve(args, {})
    _require(cfg, "A", "B", "C", "m", "omega", "phi", "T", "n")
    params = LpplParams.from_dict({k: cfg[k] for k in ("A", "B", "C", "m", "omega", "phi", "T", "n")})
    out = _outdir(cfg)
    write_series_csv(out / "lppl.csv", lppl_series(params))
    write_json(out / "params.json", params.to_dict())
    write_json(out / "run.json", {"command": "simulate-lppl", "config": _jsonable_cfg(cfg)})
    return EXIT_OK


def cmd_spectrum(args) -> int:
    cfg = _resolve(args, {})
    x, _ = _read_input(cfg["input"])
    spec = amplitude_spectrum(x, reflected=not cfg.get("unreflected"))
    out = _outdir(cfg)
    spec.to_csv(out / "spectrum.csv")
    write_json(out / "run.json", {"command": "spectrum", "config": _jsonable_cfg(cfg), "N": spec.N})
    return EXIT_OK


def _estimate(x, method: str, alpha: float):
    if method == "mle":
        return mle_from_prices(x)
    return pessimistic_sigma(power_spectrum(x), BandScheme(alpha))


def cmd_estimate(args) -> int:
    cfg = _resolve(args, {"method": "pessimistic", "alpha": 1.0})
    x, _ = _read_input(cfg["input"])
    est = _estimate(x, cfg["method"], float(cfg["alpha"]))
    doc = {"estimate": est.to_json(), "config": _jsonable_cfg(cfg)}
    print(json.dumps(doc, indent=2, sort_keys=True))
    out = _outdir(cfg)
    if out is not None:
        write_json(out / "estimate.json", doc)
    if cfg["method"] == "mle" and not est.finite and not cfg.get("allow_nonfinite"):
        log.error("maximum likelihood gave no finite tau (pass --allow-nonfinite to accept)")
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_denoise(args) -> int:
    cfg = _resolve(args, {"filter": "wiener", "method": "pessimistic", "alpha": 1.0})
    x, prices = _read_input(cfg["input"])
    P = power_spectrum(x)
    if (cfg.get("tau") is None) != (cfg.get("sigma") is None):
        raise UsageError("--tau and --sigma must be given together")
    if cfg.get("tau") is not None:
        S_hat = noise_spectrum_from(OuParams(_tau(str(cfg["tau"])), float(cfg["sigma"])), P.N)
        source = "given"
    else:
        est = _estimate(x, cfg["method"], float(cfg["alpha"]))
        S_hat = noise_spectrum(est, P.N)
        source = est.to_json()

    record = {"command": "denoise", "config": _jsonable_cfg(cfg), "noise": source}
    if cfg["filter"] == "wiener":
        filtered = wiener_filter(x, S_hat)
    else:
        if cfg.get("cutoff_index") is not None:
            f_tilde, found = int(cfg["cutoff_index"]), True
        else:
            f_tilde, found = find_cutoff(P, S_hat)
        record.update({"cutoff_index": f_tilde, "cutoff_found": found})
        filtered = cutoff_filter(x, f_tilde if found else P.N // 2 + 1)
    out = _outdir(cfg)
    write_series_csv(out / "filtered.csv", filtered)
    write_json(out / "run.json", record)
    return EXIT_OK


def noise_spectrum_from(params: OuParams, N: int):
    from lpplfreq.estimators import NoiseEstimate

    return noise_spectrum(NoiseEstimate("given", params.tau, params.sigma**2), N)


def cmd_experiment(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read config {args.config}: {exc}") from exc
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out is not None:
        raw["outputs"] = args.out
    try:
        cfg = ExperimentConfig.from_dict(raw)
    except (TypeError, ValueError, KeyError) as exc:
        raise DataError(f"bad experiment config {args.config}: {exc}") from exc
    if cfg.outputs is None:
        raise UsageError("experiment needs --out or an 'outputs' entry in the config")
    run_experiment(cfg)
    return EXIT_OK


def cmd_analyze(args) -> int:
    cfg = _resolve(args, {"alpha": 1.0, "closeness": 0.25, "cutoff_noise": "mle"})
    _, prices = _read_input(cfg["input"])
    if prices is None:
        raise DataError("analyze needs a 'date,close' price file")
    options = AnalysisOptions(alpha=float(cfg["alpha"]), closeness=float(cfg["closeness"]), cutoff_noise=cfg["cutoff_noise"])
    out = _outdir(cfg)
    report = analyze_bubble(prices, options, out)
    write_json(out / "run.json", {"command": "analyze", "config": _jsonable_cfg(cfg)})
    print(json.dumps({k: report.to_json()[k] for k in ("cutoff_index", "closeness", "flags")}, sort_keys=True))
    return EXIT_OK


COMMANDS = {
    "simulate-ou": cmd_simulate_ou,
    "simulate-lppl": cmd_simulate_lppl,
    "spectrum": cmd_spectrum,
    "estimate": cmd_estimate,
    "denoise": cmd_denoise,
    "experiment": cmd_experiment,
    "analyze": cmd_analyze,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"lpplfreq {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateInputError as exc:
        print(f"lpplfreq {args.command}: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DataError, ValueError, OSError) as exc:
        print(f"lpplfreq {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
