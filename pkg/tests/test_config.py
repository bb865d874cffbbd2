#!/usr/bin/env python3

import json

import pytest

from shng.config import (
    RunConfig, SampleConfig, parse_config, load_config, config_hash
)
from shng.exceptions import ConfigError

MODEL = {
    "variant": "SHNG", "data_config": "VIX",
    "physical": {"omega": 0.0, "beta": 0.805, "alpha": 4.14e-6, "gamma": 193.29, "lam": 2.39},
    "kernel": {"theta": 0.983, "zeta": 1.299, "sigma": 0.089, "sigma_e": 1.007}
}


def test_parse_config(tmp_path):

    config = parse_config({
        "model": MODEL, "seed": 7, "sample": {"n_days": 30, "design": {"maturities": [21, 63]}},
        "simulation": {"n_paths": 5000, "eta_mode": "constant"}, "evaluation": {"eta_levels": [0.9, 1.1]}
    }, tmp_path)
    assert isinstance(config, RunConfig)
    assert config.seed == 7
    assert config.sample == SampleConfig(n_days=30, design=config.sample.design)
    assert config.sample.design.maturities == (21, 63)
    assert config.simulation.n_paths == 5000 and config.simulation.eta_mode == "constant"
    assert config.evaluation.eta_levels == (0.9, 1.1)
    assert config.pricing.method == "certainty-equivalent"
    assert parse_config({"pricing": {"method": "mixture"}}).pricing.method == "mixture"
    assert config.resolve("data/returns.csv") == tmp_path / "data" / "returns.csv"
    assert config.resolve(None) is None

    spec = config.model.to_spec()
    assert spec.label == "SHNG[VIX]" and spec.pp.beta == 0.805 and spec.kp.theta == 0.983


def test_parse_config_errors(tmp_path):

    with pytest.raises(ConfigError, match="Invalid configuration keys"):
        parse_config({"modle": MODEL})
    with pytest.raises(ConfigError, match="Invalid model keys"):
        parse_config({"model": {**MODEL, "kappa": 1.0}})
    with pytest.raises(ConfigError, match="Invalid seed"):
        parse_config({"seed": -1})
    with pytest.raises(ConfigError, match="Invalid simulation section"):
        parse_config({"simulation": []})
    with pytest.raises(ConfigError, match="Invalid measure"):
        parse_config({"simulation": {"measure": "R"}})
    with pytest.raises(ConfigError, match="Invalid pricing method"):
        parse_config({"pricing": {"method": "quadrature"}})
    with pytest.raises(ConfigError, match="Invalid model parameters"):
        parse_config({"model": {**MODEL, "physical": {"omega": 0.0}}}).model.to_spec()


def test_score_sample_path(tmp_path):

    (tmp_path / "scores.txt").write_text("0.5\n-1.0\n0.25\n", encoding="utf-8")
    config = parse_config({"simulation": {"eta_mode": "ar1-empirical-score", "score_sample": "scores.txt"}},
                          tmp_path)
    assert config.simulation.score_sample == (0.5, -1.0, 0.25)


def test_load_config(tmp_path):

    path = tmp_path / "run.json"
    path.write_text(json.dumps({"model": MODEL, "seed": 3}), encoding="utf-8")
    config = load_config(path)
    assert config.base_path == tmp_path
    assert config_hash(config) == config_hash({"seed": 3, "model": MODEL})
    assert config_hash(config) != config_hash({"seed": 4, "model": MODEL})

    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError, match="Invalid configuration file"):
        load_config(path)
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError, match="expected: JSON object"):
        load_config(path)
