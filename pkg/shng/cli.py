#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from pathlib import Path
from typing import (
    Dict, List, Optional, Sequence, Union
)

import argparse
import json
import logging
import math
import sys

import numpy as np
import pandas as pd

from . import __version__
from .config import (
    RunConfig, SampleConfig, config_hash, load_config
)
from .data import (
    SCHEMA_VERSION, DailyPanel, call_to_put, describe_panels, ingest, preprocess, read_table, write_table
)
from .exceptions import (
    ConfigError, SHNGError
)
from .likelihood import (
    FitResult, LikelihoodReport, ModelSpec, filter_sequence, fit_mle, free_parameters, get_parameter,
    out_of_sample_loglik, pricing_error_acf, rmse_report, simulate_sample
)
from .log import setup_logging
from .model import FilterState
from .options import (
    EuropeanCall, bs_implied_vol, certainty_equivalent, price_call_stochastic
)
from .simulation import (
    density_compare, mc_density, model_density
)
from .validation import run_validation
from .vix import (
    vix_decomposition, vix_price
)

logger = logging.getLogger(__name__)

COMMANDS: Sequence[str] = ("fit", "price", "simulate", "validate", "report")
# Half-width of the density grid in cumulative-return standard deviations
DENSITY_SPAN: float = 5.0


class _Run:
    """
    Output directory bookkeeping of one command.
    """

    def __init__(self, config: RunConfig, command: str, output_dir: Path, seed: int):
        self.config, self.command, self.output_dir, self.seed = config, command, output_dir, seed
        self.files: List[str] = []

    def write(self, frame: pd.DataFrame, name: str) -> None:
        write_table(frame, self.output_dir / name)
        self.files.append(name)
        logger.info("Wrote %s (%d rows)", self.output_dir / name, len(frame))

    def manifest(self) -> Path:
        path = self.output_dir / "manifest.json"
        manifest = {
            "schema_version": SCHEMA_VERSION, "package_version": __version__, "command": self.command,
            "config_hash": config_hash(self.config), "seed": self.seed, "files": sorted(self.files)
        }
        self.output_dir.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            json.dump(manifest, handle, sort_keys=True, indent=2)
            handle.write("\n")
        return path


def _sample(config: RunConfig, seed: int) -> SampleConfig:
    sample = config.sample if config.sample is not None else SampleConfig()
    return sample if sample.seed is not None else SampleConfig(n_days=sample.n_days, seed=seed, design=sample.design)


def load_panels(config: RunConfig, spec: ModelSpec, seed: int) -> List[DailyPanel]:
    """
    Daily panels from the configured files, or drawn from the model when the
    configuration carries a ``sample`` section.
    """

    if config.sample is not None:
        sample = _sample(config, seed)
        logger.info("Simulating %d days from %s (seed %d)", sample.n_days, spec.label, sample.seed)
        return simulate_sample(spec, sample.n_days, seed=sample.seed, design=sample.design)
    if config.data.returns is None:
        raise ConfigError("Invalid data section (expected: a 'returns' file or a 'sample' section, got: neither)")
    paths = {name: config.resolve(getattr(config.data, name)) for name in ("returns", "vix", "options")}
    data = ingest(paths, config.data.schema)
    for gap in data.gaps:
        logger.warning("Data gap: %s", gap)
    panels = preprocess(data, config.preprocess)
    logger.info("Prepared %d daily panels with %d option quotes", len(panels),
                sum(len(panel.quotes) for panel in panels))
    return panels


def parameter_table(spec: ModelSpec, report: LikelihoodReport, fit: Optional[FitResult] = None) -> pd.DataFrame:
    if fit is not None:
        return fit.table()
    names = free_parameters(spec)
    frame = pd.DataFrame({"parameter": list(names), "estimate": [get_parameter(spec, name) for name in names],
                          "std_error": math.nan})
    components = pd.DataFrame({
        "parameter": ["ll_returns", "ll_vix", "ll_opt", "ll_total"], "std_error": math.nan,
        "estimate": [report.ll_returns, report.ll_vix, report.ll_opt, report.ll_total]
    })
    return pd.concat([frame, components], ignore_index=True)


def _density_tables(run: _Run, spec: ModelSpec) -> None:
    evaluation, pp, kp = run.config.evaluation, spec.pp, spec.kp
    M = evaluation.density_maturity
    state = FilterState.from_variance(pp.unconditional_variance, kp.zeta)
    spread = math.sqrt(M * state.h_star_next)
    grid = np.linspace(-DENSITY_SPAN * spread, DENSITY_SPAN * spread, evaluation.density_points)
    cfg = run.config.simulation.replace(measure="Q", horizon_days=max(M, run.config.simulation.horizon_days),
                                        seed=run.seed)
    approx = model_density(pp, kp, state, M, grid)
    simulated = mc_density(cfg, pp, kp, state, M, grid)
    comparison = density_compare(approx, simulated)
    run.write(pd.DataFrame({"grid": grid, "model": approx.density, "monte_carlo": simulated.density}), "density.csv")
    run.write(pd.DataFrame({
        "statistic": ["mean", "variance", "skewness", "kurtosis", "mass"],
        "model": [approx.mean, approx.variance, approx.skewness, approx.kurtosis, approx.mass],
        "monte_carlo": [simulated.mean, simulated.variance, simulated.skewness, simulated.kurtosis, simulated.mass]
    }).assign(sup_norm=comparison.sup_norm, l1=comparison.l1), "density_metrics.csv")


def write_reports(run: _Run, report: LikelihoodReport, panels: Sequence[DailyPanel],
                  fit: Optional[FitResult] = None) -> None:
    """
    Write the parameter, state, error and decomposition tables shared by ``fit`` and ``report``.
    """

    spec, evaluation = report.spec, run.config.evaluation
    run.write(parameter_table(spec, report, fit), "parameters.csv")
    run.write(report.states(), "states.csv")
    run.write(describe_panels(panels), "descriptive.csv")
    if evaluation.split_date is not None:
        split = pd.Timestamp(evaluation.split_date)
        run.write(rmse_report(report.window(end=split)), "rmse_in_sample.csv")
        run.write(rmse_report(report.window(start=split), burn_in=0), "rmse_out_of_sample.csv")
        if spec.uses_vix or spec.uses_options:
            run.write(out_of_sample_loglik(report, start=split).to_frame("value").reset_index(names="statistic"),
                      "loglik_out_of_sample.csv")
    else:
        run.write(rmse_report(report), "rmse_in_sample.csv")
    run.write(pricing_error_acf(report, nlags=evaluation.acf_lags), "acf.csv")
    run.write(vix_decomposition(spec.pp, spec.kp, evaluation.decomposition_maturities), "vix_decomposition.csv")
    if len(report.days):
        filtered = vix_decomposition(spec.pp, spec.kp, evaluation.decomposition_maturities,
                                     report.days["eta"].to_numpy(), report.days["h_star_next"].to_numpy())
        run.write(filtered, "vix_decomposition_filtered.csv")
    if evaluation.density:
        _density_tables(run, spec)


def command_fit(run: _Run) -> int:
    spec = run.config.model.to_spec()
    panels = load_panels(run.config, spec, run.seed)
    split = run.config.evaluation.split_date
    estimation = panels if split is None else [panel for panel in panels if panel.date < pd.Timestamp(split)]
    fit = fit_mle(spec, estimation, run.config.optimizer)
    if not fit.converged:
        logger.warning("Optimizer did not converge: %s", fit.message)
    report = fit.report if split is None else filter_sequence(fit.spec, panels)
    write_reports(run, report, panels, fit)
    return 0


def command_report(run: _Run, eta_path: Optional[Path] = None) -> int:
    spec = run.config.model.to_spec()
    panels = load_panels(run.config, spec, run.seed)
    path = None
    if eta_path is not None:
        states = read_table(eta_path)
        if "eta" not in states.columns:
            raise ConfigError(f"Invalid state file {eta_path} (expected: an 'eta' column)")
        path = states["eta"].to_numpy(dtype=float)
    write_reports(run, filter_sequence(spec, panels, eta_path=path), panels)
    return 0


def command_price(run: _Run) -> int:
    spec, pricing = run.config.model.to_spec(), run.config.pricing
    pp, kp = spec.pp, spec.kp
    eta = kp.zeta if pricing.eta is None else pricing.eta
    h_next = pp.unconditional_variance if pricing.h_next is None else pricing.h_next
    h_star = eta * h_next
    if not math.isclose(pricing.rate, pp.r):
        logger.warning("Pricing rate %g differs from the model rate %g", pricing.rate, pp.r)

    rows: List[Dict] = []
    for M in run.config.evaluation.vix_maturities:
        rows.append({"instrument": "VIX", "maturity": int(M), "strike": math.nan,
                     "price": vix_price(pp, kp, eta, h_star, int(M)).value, "implied_vol": math.nan,
                     "put_price": math.nan, "psi": math.nan})
    for M in pricing.maturities:
        psi = float(certainty_equivalent(pp, kp, eta, h_star, M).psi)
        for strike in pricing.strikes:
            call = EuropeanCall(spot=pricing.spot, strike=strike, maturity_days=M, rate=pricing.rate)
            price = price_call_stochastic(pp, kp, call, eta, h_star, nodes=spec.nodes, method=pricing.method)
            try:
                iv = bs_implied_vol(price, call)
            except SHNGError:
                iv = math.nan
            rows.append({"instrument": "call", "maturity": M, "strike": strike, "price": price, "implied_vol": iv,
                         "put_price": call_to_put(price, call.spot, strike, call.rate, M), "psi": psi})
    run.write(pd.DataFrame(rows), "prices.csv")
    return 0


def command_simulate(run: _Run) -> int:
    """
    Write returns, VIX and option files in the default input schema.
    """

    spec = run.config.model.to_spec()
    sample = _sample(run.config, run.seed)
    panels = simulate_sample(spec, sample.n_days, seed=sample.seed, design=sample.design)
    first = panels[0].date - pd.offsets.BDay(1)
    closes = pd.DataFrame({
        "date": [first] + [panel.date for panel in panels],
        "close": [sample.design.spot] + [panel.spot for panel in panels]
    })
    vix = pd.DataFrame({"date": [panel.date for panel in panels], "vix": [panel.vix for panel in panels]})
    options = []
    for panel in panels:
        for quote, maturity in zip(panel.quotes, panel.maturities):
            is_call = quote.strike >= panel.spot
            # in-the-money calls are written as out-of-the-money puts
            price = quote.price if is_call else call_to_put(quote.price, panel.spot, quote.strike, panel.rate, maturity)
            options.append({"date": panel.date, "strike": quote.strike, "dtm": quote.maturity_days, "price": price,
                            "cp_flag": "C" if is_call else "P", "volume": quote.volume})
    date_format = lambda frame: frame.assign(date=pd.to_datetime(frame["date"]).dt.strftime("%Y-%m-%d"))
    run.write(date_format(closes), "returns.csv")
    run.write(date_format(vix), "vix.csv")
    run.write(date_format(pd.DataFrame(
        options, columns=["date", "strike", "dtm", "price", "cp_flag", "volume"]
    )), "options.csv")
    report = filter_sequence(spec, panels)
    run.write(parameter_table(spec, report), "parameters.csv")
    run.write(report.states(), "states.csv")
    return 0


def command_validate(run: _Run) -> int:
    spec, evaluation = run.config.model.to_spec(), run.config.evaluation
    frame = run_validation(
        spec.pp, spec.kp, run.config.simulation.replace(seed=run.seed), evaluation.eta_levels,
        maturities=evaluation.vix_maturities, draws=evaluation.validation_draws
    )
    run.write(frame, "validation.csv")
    failed = int((~frame["passed"]).sum())
    logger.info("Validation: %d of %d checks passed", len(frame) - failed, len(frame))
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shng", description=f"Score-driven Heston-Nandi GARCH pricing {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    helps = {
        "fit": "estimate a model and write its states and error tables",
        "price": "price VIX and option quotes at a configured state",
        "simulate": "write a synthetic data set in the default input schema",
        "validate": "run the closed-form and Monte Carlo oracle checks",
        "report": "filter at configured parameters and write the tables of 'fit'",
    }
    for command in COMMANDS:
        sub = subparsers.add_parser(command, help=helps[command])
        sub.add_argument("--config", required=True, type=Path, help="JSON run configuration")
        sub.add_argument("--seed", type=int, default=None, help="override the configured seed")
        sub.add_argument("--output-dir", type=Path, default=Path("output"), help="directory of the written files")
        verbosity = sub.add_mutually_exclusive_group()
        verbosity.add_argument("--verbose", action="store_true", help="log debug records")
        verbosity.add_argument("--quiet", action="store_true", help="log warnings and errors only")
        if command == "report":
            sub.add_argument("--eta-path", type=Path, default=None, help="states file whose 'eta' column is replayed")
    return parser


def run(config_file: Union[str, Path], command: str = "fit", output_dir: Union[str, Path] = "output",
        seed: Optional[int] = None, eta_path: Optional[Path] = None) -> int:
    """
    Execute one command of a run configuration and write its files and manifest.

    :param config_file: JSON run configuration
    :type config_file: Union[str, Path]
    :param command: One of ``fit``, ``price``, ``simulate``, ``validate`` or ``report``, default to ``fit``
    :type command: str
    :param output_dir: Directory of the written files, default to ``output``
    :type output_dir: Union[str, Path]
    :param seed: Seed overriding the configured one, default to ``None``
    :type seed: Optional[int]
    :param eta_path: States file replayed by ``report``, default to ``None``
    :type eta_path: Optional[Path]

    :returns: int -- ``0``, or ``1`` when a validation check failed
    """

    if command not in COMMANDS:
        raise ConfigError(f"Invalid command (expected: {list(COMMANDS)}, got: {command!r})")
    config = load_config(config_file)
    seed = config.seed if seed is None else seed
    if seed < 0:
        raise ConfigError(f"Invalid seed (expected: non-negative integer, got: {seed})")
    context = _Run(config, command, Path(output_dir), seed)
    if command == "fit":
        status = command_fit(context)
    elif command == "price":
        status = command_price(context)
    elif command == "simulate":
        status = command_simulate(context)
    elif command == "validate":
        status = command_validate(context)
    else:
        status = command_report(context, eta_path)
    context.manifest()
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Command-line entry point; returns ``0`` on success, ``1`` on a model, data or
    validation failure and ``2`` on an unexpected error.
    """

    args = build_parser().parse_args(argv)
    setup_logging("DEBUG" if args.verbose else "WARNING" if args.quiet else None)
    try:
        return run(args.config, args.command, args.output_dir, args.seed, getattr(args, "eta_path", None))
    except SHNGError as error:
        logger.error("%s: %s", type(error).__name__, error)
        return 1
    except Exception:
        logger.exception("Unexpected error")
        return 2


if __name__ == "__main__":
    sys.exit(main())
