#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from typing import List

__version__, __license__, __author__, __email__, __description__ = (
    "v0.1.0",
    "MIT",
    "SHNG Pricing Developers",
    "shng-pricing@users.noreply.github.com",
    "Python library for score-driven Heston-Nandi GARCH pricing of VIX and index options."
)

from .model import (
    PhysicalParams,
    KernelParams,
    FilterState,
    variance_update,
    filter_physical_variance,
    q_day_params,
    q_persistence,
    kernel_coeffs,
    log_kernel_quadratic,
    news_impact_curve,
    to_risk_neutral_shock,
    to_physical_shock
)
from .vix import (
    ar1_moments,
    vix_terms_closed,
    vix_terms_bruteforce,
    vix_price,
    delta_bound,
    expected_variance_path,
    vix_decomposition
)
from .options import (
    EuropeanCall,
    mgf_coeffs,
    price_call_predetermined,
    price_put_predetermined,
    compensation_psi,
    certainty_equivalent,
    price_call_stochastic,
    price_call_mixture,
    eta_scenarios,
    return_density,
    bs_implied_vol,
    bs_vega
)
from .score import (
    Instruments,
    dvix_deta,
    doption_deta,
    score_gradient,
    fisher_information,
    scaled_score_and_update
)
from .likelihood import (
    ModelSpec,
    OptimizerConfig,
    loglik_returns,
    loglik_day,
    loglik_derivatives,
    filter_sequence,
    fit_mle,
    rmse_report,
    pricing_error_acf,
    out_of_sample_loglik,
    simulate_sample
)
from .simulation import (
    SimConfig,
    simulate,
    mc_option_price,
    mc_martingale,
    term_structure_moments,
    mc_density,
    density_compare
)
from .data import (
    DataSchema,
    PreprocessConfig,
    ingest,
    preprocess
)
from .config import (
    RunConfig,
    load_config
)
from .validation import run_validation

__all__: List[str] = [
    "PhysicalParams",
    "KernelParams",
    "FilterState",
    "variance_update",
    "filter_physical_variance",
    "q_day_params",
    "q_persistence",
    "kernel_coeffs",
    "log_kernel_quadratic",
    "news_impact_curve",
    "to_risk_neutral_shock",
    "to_physical_shock",
    "ar1_moments",
    "vix_terms_closed",
    "vix_terms_bruteforce",
    "vix_price",
    "delta_bound",
    "expected_variance_path",
    "vix_decomposition",
    "EuropeanCall",
    "mgf_coeffs",
    "price_call_predetermined",
    "price_put_predetermined",
    "compensation_psi",
    "certainty_equivalent",
    "price_call_stochastic",
    "price_call_mixture",
    "eta_scenarios",
    "return_density",
    "bs_implied_vol",
    "bs_vega",
    "Instruments",
    "dvix_deta",
    "doption_deta",
    "score_gradient",
    "fisher_information",
    "scaled_score_and_update",
    "ModelSpec",
    "OptimizerConfig",
    "loglik_returns",
    "loglik_day",
    "loglik_derivatives",
    "filter_sequence",
    "fit_mle",
    "rmse_report",
    "pricing_error_acf",
    "out_of_sample_loglik",
    "simulate_sample",
    "SimConfig",
    "simulate",
    "mc_option_price",
    "mc_martingale",
    "term_structure_moments",
    "mc_density",
    "density_compare",
    "DataSchema",
    "PreprocessConfig",
    "ingest",
    "preprocess",
    "RunConfig",
    "load_config",
    "run_validation",

    "__version__",
    "__license__",
    "__author__",
    "__email__",
    "__description__",
]
