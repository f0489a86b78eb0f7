"""Run any experiment config: python scripts/run_config.py configs/tau_sweep.json out/tau_sweep"""

import argparse
import json
import logging

from lpplfreq.experiments import ExperimentConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("config")
    ap.add_argument("out")
    ap.add_argument("--n-jobs", type=int, default=None)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    raw = json.load(open(args.config, encoding="utf-8"))
    raw["outputs"] = args.out
    if args.n_jobs is not None:
        raw["n_jobs"] = args.n_jobs
    result = run_experiment(ExperimentConfig.from_dict(raw))
    if isinstance(result, list):
        for row in result:
            print(row)
    elif isinstance(result, dict):
        print(json.dumps(result, indent=2, sort_keys=True))
    else:
        print(json.dumps({k: result.to_json()[k] for k in ("cutoff_index", "closeness", "flags")}, indent=2))


if __name__ == "__main__":
    main()
