import json

import numpy as np
import pytest

from lpplfreq.cli import build_parser, main
from lpplfreq.experiments import business_days, exponential_wiener_prices
from lpplfreq.timeseries import PriceSeries, read_series_csv, write_csv, write_series_csv

VERB_FLAGS = {
    "simulate-ou": ["--tau", "--sigma", "--n", "--seed", "--out", "--config", "--start-zero"],
    "simulate-lppl": ["--A", "--B", "--C", "--m", "--omega", "--phi", "--T", "--n", "--out", "--config"],
    "spectrum": ["--input", "--out", "--config", "--unreflected"],
    "estimate": ["--input", "--method", "--alpha", "--allow-nonfinite", "--out", "--config"],
    "denoise": ["--input", "--filter", "--method", "--tau", "--sigma", "--alpha", "--cutoff-index", "--out", "--config"],
    "experiment": ["--config", "--seed", "--out"],
    "analyze": ["--input", "--alpha", "--closeness", "--cutoff-noise", "--out", "--config"],
}


@pytest.fixture
def prices_csv(tmp_path):
    path = tmp_path / "prices.csv"
    write_csv(path, exponential_wiener_prices(400, 0.001, 0.01, 3))
    return path


@pytest.mark.parametrize("verb", sorted(VERB_FLAGS))
def test_help_lists_every_flag(verb, capsys):
    assert main([verb, "--help"]) == 0
    text = capsys.readouterr().out
    for flag in VERB_FLAGS[verb]:
        assert flag in text
    sub = build_parser()._subparsers._group_actions[0].choices[verb]
    declared = {s for a in sub._actions for s in a.option_strings} - {"-h", "--help"}
    assert declared == set(VERB_FLAGS[verb])


def test_simulate_ou_is_reproducible(tmp_path):
    args = ["simulate-ou", "--tau", "5", "--sigma", "0.2", "--n", "1000", "--seed", "42"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("ou.csv", "run.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert len(read_series_csv(tmp_path / "a" / "ou.csv")) == 1000
    run = json.loads((tmp_path / "a" / "run.json").read_text())
    assert run["config"] == {"tau": 5.0, "sigma": 0.2, "n": 1000, "seed": 42}


def test_simulate_wiener(tmp_path):
    assert main(["simulate-ou", "--tau", "inf", "--sigma", "1", "--n", "50", "--seed", "1", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "run.json").read_text())["config"]["tau"] == "inf"


def test_usage_errors(tmp_path, capsys):
    out = ["--out", str(tmp_path)]
    assert main(["simulate-ou", "--tau", "5", "--sigma", "0.2", "--n", "10"] + out) == 1  # no seed
    assert main(["simulate-ou", "--bogus", "1"] + out) == 1
    assert main(["no-such-verb"]) == 1
    assert main([]) == 1
    assert "usage" in capsys.readouterr().err


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tau": 5, "sigma": 0.2, "n": 20, "seed": 1}))
    assert main(["simulate-ou", "--config", str(cfg), "--n", "30", "--out", str(tmp_path / "o")]) == 0
    assert len(read_series_csv(tmp_path / "o" / "ou.csv")) == 30
    cfg.write_text(json.dumps({"colour": "red"}))
    assert main(["simulate-ou", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert main(["simulate-ou", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")]) == 2


def test_simulate_lppl_and_spectrum(tmp_path):
    args = ["simulate-lppl", "--A", "1", "--B", "0.5", "--C", "0.1", "--m", "0.5", "--omega", "6", "--phi", "0", "--T", "210", "--n", "200"]
    assert main(args + ["--out", str(tmp_path / "l")]) == 0
    assert main(["spectrum", "--input", str(tmp_path / "l" / "lppl.csv"), "--out", str(tmp_path / "s")]) == 0
    lines = (tmp_path / "s" / "spectrum.csv").read_text().splitlines()
    assert lines[0] == "freq,amplitude,power" and len(lines) == 1 + 200  # N/2 + 1 rows, N = 398
    assert main(["spectrum", "--unreflected", "--input", str(tmp_path / "l" / "lppl.csv"), "--out", str(tmp_path / "u")]) == 0
    bad = args[:-2] + ["--n", "500"]
    assert main(bad + ["--out", str(tmp_path / "x")]) == 2  # T <= n - 1


def test_estimate_constant_series_gives_zero(tmp_path, capsys):
    flat = tmp_path / "flat.csv"
    write_csv(flat, PriceSeries(business_days(64), np.full(64, 5.0)))
    assert main(["-q", "estimate", "--method", "pessimistic", "--input", str(flat), "--out", str(tmp_path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["estimate"]["sigma2_hat"] == 0.0
    assert json.loads((tmp_path / "estimate.json").read_text()) == doc
    assert main(["estimate", "--method", "mle", "--input", str(flat)]) == 3


def test_estimate_nonfinite_exit_code(tmp_path):
    series = tmp_path / "s.csv"
    write_series_csv(series, (-1.0) ** np.arange(40))
    code = main(["estimate", "--method", "mle", "--input", str(series)])
    assert code == 3
    assert main(["estimate", "--method", "mle", "--allow-nonfinite", "--input", str(series)]) == 0


def test_data_errors(tmp_path):
    assert main(["estimate", "--input", str(tmp_path / "missing.csv")]) == 2
    junk = tmp_path / "junk.csv"
    junk.write_text("a,b\n1,2\n")
    assert main(["estimate", "--input", str(junk)]) == 2


def test_denoise_variants(tmp_path, prices_csv):
    assert main(["denoise", "--input", str(prices_csv), "--out", str(tmp_path / "w")]) == 0
    assert main(["denoise", "--input", str(prices_csv), "--filter", "cutoff", "--cutoff-index", "5", "--out", str(tmp_path / "c")]) == 0
    run = json.loads((tmp_path / "c" / "run.json").read_text())
    assert run["cutoff_index"] == 5 and run["config"]["cutoff_index"] == 5
    assert main(["denoise", "--input", str(prices_csv), "--tau", "inf", "--sigma", "0.01", "--out", str(tmp_path / "k")]) == 0
    assert main(["denoise", "--input", str(prices_csv), "--tau", "5", "--out", str(tmp_path / "k")]) == 1
    assert main(["denoise", "--input", str(prices_csv), "--filter", "cutoff", "--cutoff-index", "9999", "--out", str(tmp_path / "e")]) == 2
    assert len(read_series_csv(tmp_path / "w" / "filtered.csv")) == 400


def test_analyze(tmp_path, prices_csv):
    args = ["analyze", "--input", str(prices_csv), "--alpha", "1"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("report.json", "spectrum.csv", "filtered.csv", "run.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert report["options"]["alpha"] == 1.0


def test_analyze_rejects_series_file(tmp_path):
    series = tmp_path / "s.csv"
    write_series_csv(series, np.arange(100.0))
    assert main(["analyze", "--input", str(series), "--out", str(tmp_path / "o")]) == 2


def test_experiment_verb(tmp_path):
    cfg = tmp_path / "e.json"
    cfg.write_text(json.dumps({"name": "t", "kind": "tau_sweep", "n": 500, "replicates": 2, "sweep": {"tau": [5]}}))
    assert main(["experiment", "--config", str(cfg), "--seed", "4", "--out", str(tmp_path / "o")]) == 0
    assert json.loads((tmp_path / "o" / "config.json").read_text())["seed"] == 4
    assert main(["experiment", "--config", str(cfg)]) == 1
    cfg.write_text(json.dumps({"name": "t", "kind": "bogus"}))
    assert main(["experiment", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
