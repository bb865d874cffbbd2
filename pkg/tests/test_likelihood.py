#!/usr/bin/env python3

import json
import math
import os

import numpy as np
import pandas as pd
import pytest

from shng.data import DailyPanel
from shng.exceptions import ConfigError, DomainError, EstimationError, FilteringError
from shng.model import PhysicalParams, filter_physical_variance
from shng.likelihood import (
    ModelSpec, OptimizerConfig, SampleDesign, loglik_returns, loglik_day, loglik_day_dense, loglik_derivatives,
    filter_sequence, free_parameters, get_parameter, with_parameters, fit_mle, rmse_report, pricing_error_acf,
    out_of_sample_loglik, simulate_sample
)

# Test Values
base_path: str = os.path.dirname(__file__)
file_path: str = os.path.abspath(os.path.join(base_path, "values.json"))
values = open(file_path, "r", encoding="utf-8")
_: dict = json.loads(values.read())
values.close()

DESIGN = SampleDesign(maturities=(21, 63, 126), moneyness=(0.0, 0.5, -0.5))


@pytest.fixture(scope="module")
def shng_sample(shng_opt):
    pp, kp = shng_opt
    spec = ModelSpec("SHNG", "VIX+Opt", pp, kp, burn_in=5)
    return spec, simulate_sample(spec, 40, seed=1, design=DESIGN)


def test_loglik_returns(shng_opt):

    value = _["loglik_returns"]
    flat = PhysicalParams(omega=0.0, beta=0.0, alpha=0.0, gamma=0.0, lam=0.5)
    result = loglik_returns(flat, [value["ret"]], h_init=value["h"])
    assert result.total == pytest.approx(value["value"], rel=1e-15)

    pp, _kp = shng_opt
    returns = [0.01, -0.02, 0.003]
    result = loglik_returns(pp, returns)
    expected = sum(-0.5 * (math.log(2 * math.pi) + math.log(h) + z ** 2)
                   for h, z in zip(result.path.h[:-1], result.path.z))
    assert result.total == pytest.approx(expected, rel=1e-14)
    assert result.per_day.shape == (3,)


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_loglik_day(n):

    errors = np.random.default_rng(n).normal(scale=2.0, size=n)
    for rho in (0.0, 0.148, 0.6):
        assert loglik_day(errors, 1.9, rho) == pytest.approx(loglik_day_dense(errors, 1.9, rho), rel=1e-12)
    assert loglik_day([], 1.9, 0.2) == 0.0


def test_loglik_derivatives(shng_opt):

    _pp, kp = shng_opt
    blocks = [[0.5], [1.0, -0.5, 0.25], []]
    expected = sum(loglik_day(block, kp.sigma_e, kp.rho) for block in blocks)
    assert loglik_derivatives(kp, blocks) == pytest.approx(expected, rel=1e-15)
    with pytest.raises(DomainError, match="Invalid rho"):
        loglik_derivatives(kp.replace(rho=-0.4), [[1.0, 2.0, 3.0, 4.0]])


def test_model_spec(shng_opt):

    pp, kp = shng_opt
    spec = ModelSpec("HNG", "VIX", pp.replace(omega=1e-7), kp, fix_omega_zero=True)
    assert spec.kp.sigma == 0.0 and spec.pp.omega == 0.0
    assert spec.label == "HNG[VIX]"
    assert spec.uses_vix and not spec.uses_options
    with pytest.raises(DomainError, match="Invalid variant"):
        ModelSpec("GARCH", "VIX", pp, kp)
    with pytest.raises(DomainError, match="Invalid data config"):
        ModelSpec("SHNG", "Futures", pp, kp)


def test_free_parameters(shng_opt):

    pp, kp = shng_opt
    assert free_parameters(ModelSpec("SHNG", "VIX+Opt", pp, kp)) == (
        "omega", "beta", "alpha", "gamma", "lam", "theta", "zeta", "sigma", "sigma_e", "rho"
    )
    assert free_parameters(ModelSpec("HNG", "VIX", pp, kp, fix_omega_zero=True)) == (
        "beta", "alpha", "gamma", "lam", "zeta", "sigma_e"
    )
    spec = with_parameters(ModelSpec("SHNG", "Opt", pp, kp), ["beta", "rho"], [0.6, 0.2])
    assert get_parameter(spec, "beta") == 0.6 and get_parameter(spec, "rho") == 0.2
    with pytest.raises(EstimationError, match="Invalid parameter names"):
        with_parameters(spec, ["kappa"], [1.0])


def test_simulate_sample(shng_sample):

    spec, panels = shng_sample
    assert len(panels) == 40
    assert all(len(panel.quotes) == 3 for panel in panels)
    assert all(panel.vix is not None and panel.vix > 0 for panel in panels)
    assert panels[0].maturities == (21, 63, 126)
    again = simulate_sample(spec, 40, seed=1, design=DESIGN)
    assert [panel.ret for panel in again] == [panel.ret for panel in panels]
    with pytest.raises(ValueError, match="Invalid number of days"):
        simulate_sample(spec, 0)


def test_filter_sequence(shng_sample):

    spec, panels = shng_sample
    report = filter_sequence(spec, panels)
    assert len(report.days) == 40
    assert len(report.options) == 120
    assert report.days["eta"].iloc[0] == spec.kp.zeta
    assert np.all(report.days["eta"] >= spec.eta_floor)
    assert report.ll_total == pytest.approx(report.ll_returns + report.ll_vix + report.ll_opt, rel=1e-14)
    assert np.all(np.isfinite(report.days["score"]))
    assert list(report.states().columns) == ["date", "h", "h_star", "eta", "score", "score_p"]

    # replaying the filtered path reproduces the likelihood
    replay = filter_sequence(spec, panels, eta_path=report.eta_path)
    assert replay.ll_total == pytest.approx(report.ll_total, rel=1e-12)
    with pytest.raises(ValueError, match="Invalid eta path length"):
        filter_sequence(spec, panels, eta_path=report.eta_path[:5])


def test_filter_sequence_variance_path(shng_sample):

    spec, panels = shng_sample
    days = filter_sequence(spec, panels).days
    path = filter_physical_variance(spec.pp, [panel.ret for panel in panels])
    assert np.array_equal(days["h"].to_numpy(), path.h[:-1])
    assert np.array_equal(days["h_next"].to_numpy(), path.h[1:])
    assert np.array_equal(days["z"].to_numpy(), path.z)
    assert days["ll_ret"].sum() == pytest.approx(loglik_returns(spec.pp, [panel.ret for panel in panels]).total,
                                                rel=1e-12)


def test_filter_sequence_hng(hng_vix):

    pp, kp = hng_vix
    spec = ModelSpec("HNG", "VIX", pp, kp)
    panels = simulate_sample(spec, 20, seed=2)
    report = filter_sequence(spec, panels)
    assert np.all(report.days["eta"] == kp.zeta)
    assert np.all(report.days["score"] == 0.0)
    assert report.ll_opt == 0.0
    assert report.options.empty


def test_filter_sequence_bad_return(shng_opt):

    pp, kp = shng_opt
    spec = ModelSpec("SHNG", "VIX", pp, kp)
    panels = [DailyPanel(date=pd.Timestamp("2020-01-02"), ret=0.001, spot=1000.0, vix=15.0),
              DailyPanel(date=pd.Timestamp("2020-01-03"), ret=math.nan, spot=1000.0, vix=15.0)]
    with pytest.raises(FilteringError, match=r"day: 1") as error:
        filter_sequence(spec, panels)
    assert error.value.day == 1


def test_reports(shng_sample):

    spec, panels = shng_sample
    report = filter_sequence(spec, panels)
    rmse = rmse_report(report)
    assert list(rmse.columns) == ["table", "partition", "bucket", "rmse", "count"]
    overall = rmse[(rmse["partition"] == "all")]
    assert set(overall["table"]) == {"VIX", "IV"}
    assert overall[overall["table"] == "VIX"]["count"].iloc[0] == 40 - spec.burn_in
    assert (rmse["rmse"] >= 0).all()

    acf = pricing_error_acf(report, nlags=5)
    assert list(acf.columns) == ["lag", "vix", "option"]
    assert acf["vix"].iloc[0] == pytest.approx(1.0, rel=1e-12)

    split = report.days["date"].iloc[30]
    oos = out_of_sample_loglik(report, start=split)
    assert oos["days"] == 10
    assert np.isfinite(oos["in_sample"]) and np.isfinite(oos["refitted"])
    assert oos["sigma_e_refit"] > 0


@pytest.mark.slow
def test_fit_mle_recovers_persistence(shng_vix):

    pp, kp = shng_vix
    truth = ModelSpec("SHNG", "VIX", pp, kp, fix_omega_zero=True, burn_in=0)
    panels = simulate_sample(truth, 1000, seed=4)
    start = truth.replace(pp=pp.replace(beta=0.75, gamma=220.0), kp=kp.replace(theta=0.95, sigma=0.06))
    result = fit_mle(start, panels, OptimizerConfig(robust_se=False, max_iter=100))
    assert result.estimates["beta"] + result.estimates["alpha"] * result.estimates["gamma"] ** 2 == pytest.approx(
        pp.persistence, abs=0.02
    )
    assert result.loglik >= filter_sequence(start, panels).ll_total
    assert list(result.table()["parameter"])[-4:] == ["ll_returns", "ll_vix", "ll_opt", "ll_total"]


@pytest.mark.slow
def test_score_removes_error_autocorrelation(shng_vix):

    pp, kp = shng_vix
    truth = ModelSpec("SHNG", "VIX", pp, kp, burn_in=0)
    panels = simulate_sample(truth, 600, seed=6)
    filtered = pricing_error_acf(filter_sequence(truth, panels), nlags=5)
    misspecified = pricing_error_acf(filter_sequence(truth.replace(variant="HNG", kp=kp.replace(sigma=0.0)), panels),
                                     nlags=5)
    assert abs(filtered["vix"].iloc[1]) < misspecified["vix"].iloc[1]
    assert misspecified["vix"].iloc[1] > 0.5
    assert abs(filtered["vix"].iloc[1]) < 0.25


@pytest.mark.slow
def test_fit_mle_two_stage(hng_vix):

    pp, kp = hng_vix
    truth = ModelSpec("HNG", "VIX", pp, kp, fix_omega_zero=True, burn_in=0)
    panels = simulate_sample(truth, 300, seed=8)
    result = fit_mle(truth, panels, OptimizerConfig(two_stage=True))
    assert result.stages == ["returns", "derivatives"]
    assert result.std_errors.index.tolist() == list(result.names)
    assert np.isfinite(result.loglik)


def test_optimizer_config():

    assert OptimizerConfig().covariance == "sandwich"
    assert OptimizerConfig(covariance="opg").covariance == "opg"
    with pytest.raises(ConfigError, match="Invalid covariance"):
        OptimizerConfig(covariance="hessian")


@pytest.mark.slow
def test_fit_mle_recovers_options_model(shng_opt):

    pp, kp = shng_opt
    truth = ModelSpec("SHNG", "Opt", pp, kp, fix_omega_zero=True, burn_in=0)
    panels = simulate_sample(truth, 2000, seed=10)
    assert all(len(panel.quotes) == 6 for panel in panels)
    result = fit_mle(truth, panels, OptimizerConfig(max_iter=50, covariance="opg"))
    assert list(result.names) == ["beta", "alpha", "gamma", "lam", "theta", "zeta", "sigma", "sigma_e", "rho"]
    for name in result.names:
        se = result.std_errors[name]
        assert np.isfinite(se) and se > 0
        assert abs(result.estimates[name] - get_parameter(truth, name)) < 3 * se


@pytest.mark.slow
def test_fit_mle_nests_constant_ratio(shng_opt):

    pp, kp = shng_opt
    truth = ModelSpec("SHNG", "Opt", pp, kp, fix_omega_zero=True, burn_in=0)
    panels = simulate_sample(truth, 300, seed=12, design=DESIGN)
    config = OptimizerConfig(robust_se=False, max_iter=30)
    score_driven = fit_mle(truth, panels, config)
    constant = fit_mle(truth.replace(variant="HNG", kp=kp.replace(sigma=0.0)), panels, config)
    assert score_driven.loglik >= constant.loglik
