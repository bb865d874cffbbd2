#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from dataclasses import (
    dataclass, field, replace
)
from typing import (
    Callable, Dict, List, Literal, Optional, Sequence, Tuple
)

import logging
import math

import numpy as np
import pandas as pd
from scipy.optimize import minimize
from scipy.special import expit, logit
from statsmodels.tools.numdiff import (
    approx_fprime, approx_hess
)
from statsmodels.tsa.stattools import acf

from .data import (
    DELTA_EDGES, DTM_EDGES, VIX_EDGES, DailyPanel, OptionQuote, bucketize
)
from .exceptions import (
    ConfigError, ConsistencyError, DegenerateInformationError, DomainError, EstimationError, FilteringError,
    PricingError, SensitivityError, SHNGError
)
from .libs.equicorrelation import (
    EquicorrAlgebra, check_rho, equicorrelation_matrix
)
from .libs.quadrature import DEFAULT_NODES
from .model import (
    VARIANCE_FLOOR, FilterState, KernelParams, PhysicalParams, VariancePath, filter_physical_variance,
    standardized_shock, variance_update
)
from .options import (
    EuropeanCall, bs_delta, bs_implied_vol, bs_vega, panel_call_prices
)
from .score import (
    ETA_FLOOR, Instruments, eta_update, instrument_values, score_context
)
from .utils import CALENDAR_DAYS_PER_YEAR, TRADING_DAYS_PER_YEAR

logger = logging.getLogger(__name__)

LOG_2PI: float = math.log(2.0 * math.pi)
# Days excluded from the pricing-error tables
BURN_IN: int = 63
# Objective value returned for inadmissible parameter vectors
PENALTY: float = 1e6

VARIANTS: Tuple[str, ...] = ("HNG", "SHNG")
DATA_CONFIGS: Tuple[str, ...] = ("VIX", "Opt", "VIX+Opt")
COVARIANCE_METHODS: Tuple[str, ...] = ("sandwich", "opg")
PHYSICAL_NAMES: Tuple[str, ...] = ("omega", "beta", "alpha", "gamma", "lam")
KERNEL_NAMES: Tuple[str, ...] = ("theta", "zeta", "sigma", "sigma_e", "rho")
# Errors that abort filtering on the offending day
_DAY_ERRORS = (ConsistencyError, DegenerateInformationError, DomainError, PricingError, SensitivityError)


@dataclass(frozen=True)
class ModelSpec:
    """
    Model variant, data configuration and parameters.

    The ``HNG`` variant holds the variance risk ratio at :math:`\\zeta` and forces
    :math:`\\sigma = 0`; ``fix_omega_zero`` forces :math:`\\omega = 0`.
    """

    variant: Literal["HNG", "SHNG"]
    data_config: Literal["VIX", "Opt", "VIX+Opt"]
    pp: PhysicalParams
    kp: KernelParams
    fix_omega_zero: bool = False
    vix_maturity: int = 21
    burn_in: int = BURN_IN
    eta_floor: float = ETA_FLOOR
    nodes: int = DEFAULT_NODES
    standardize_scores: bool = True

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise DomainError(f"Invalid variant (expected: {VARIANTS}, got: {self.variant!r})")
        if self.data_config not in DATA_CONFIGS:
            raise DomainError(f"Invalid data config (expected: {DATA_CONFIGS}, got: {self.data_config!r})")
        if self.burn_in < 0:
            raise DomainError(f"Invalid burn-in (expected: >= 0, got: {self.burn_in})")
        if self.variant == "HNG" and self.kp.sigma != 0:
            object.__setattr__(self, "kp", self.kp.replace(sigma=0.0))
        if self.fix_omega_zero and self.pp.omega != 0:
            object.__setattr__(self, "pp", self.pp.replace(omega=0.0))

    @property
    def uses_vix(self) -> bool:
        return self.data_config in ("VIX", "VIX+Opt")

    @property
    def uses_options(self) -> bool:
        return self.data_config in ("Opt", "VIX+Opt")

    @property
    def label(self) -> str:
        return f"{self.variant}[{self.data_config}]"

    def replace(self, **changes) -> "ModelSpec":
        return replace(self, **changes)

    def instruments(self, panel: DailyPanel) -> Instruments:
        return panel.instruments(self.vix_maturity if self.uses_vix else None, options=self.uses_options)


@dataclass(frozen=True)
class ReturnsLikelihood:
    total: float
    per_day: np.ndarray
    path: VariancePath


@dataclass
class LikelihoodReport:
    """
    Filtered states and log-likelihood components.

    ``days`` holds one row per day (returns, states, scores, VIX errors and the
    likelihood terms); ``options`` one row per option quote.
    """

    spec: ModelSpec
    days: pd.DataFrame
    options: pd.DataFrame

    @property
    def ll_returns(self) -> float:
        return float(self.days["ll_ret"].sum())

    @property
    def ll_vix(self) -> float:
        return float(self.days["ll_vix"].sum())

    @property
    def ll_opt(self) -> float:
        return float(self.days["ll_opt"].sum())

    @property
    def ll_derivatives(self) -> float:
        return self.ll_vix + self.ll_opt

    @property
    def ll_total(self) -> float:
        return self.ll_returns + self.ll_derivatives

    @property
    def per_day_loglik(self) -> np.ndarray:
        return self.days[["ll_ret", "ll_vix", "ll_opt"]].sum(axis=1).to_numpy()

    @property
    def eta_path(self) -> np.ndarray:
        return self.days["eta"].to_numpy()

    def window(self, start: Optional[pd.Timestamp] = None, end: Optional[pd.Timestamp] = None) -> "LikelihoodReport":
        """
        Restrict the report to ``start <= date < end``.
        """

        def mask(dates: pd.Series) -> np.ndarray:
            keep = np.ones(len(dates), dtype=bool)
            if start is not None:
                keep &= (dates >= pd.Timestamp(start)).to_numpy()
            if end is not None:
                keep &= (dates < pd.Timestamp(end)).to_numpy()
            return keep

        return LikelihoodReport(
            spec=self.spec, days=self.days[mask(self.days["date"])].reset_index(drop=True),
            options=self.options[mask(self.options["date"])].reset_index(drop=True)
        )

    def states(self) -> pd.DataFrame:
        return self.days[["date", "h", "h_star", "eta", "score", "score_p"]]


def loglik_returns(pp: PhysicalParams, returns: Sequence[float], h_init: Optional[float] = None) -> ReturnsLikelihood:
    """
    Gaussian log-likelihood of the returns under the physical variance recursion.

    :param pp: Physical parameters
    :type pp: PhysicalParams
    :param returns: Daily log-returns
    :type returns: Sequence[float]
    :param h_init: First-day variance, default to the unconditional variance
    :type h_init: Optional[float]

    :returns: ReturnsLikelihood -- Total, per-day terms and the variance path

    >>> from shng.likelihood import loglik_returns
    >>> from shng.model import PhysicalParams
    >>> round(loglik_returns(PhysicalParams(0.0, 0.0, 0.0, 0.0, 0.5), [0.0], h_init=1.0).total, 6)
    -0.918939
    """

    path = filter_physical_variance(pp, returns, h_init)
    per_day = -0.5 * (LOG_2PI + np.log(path.h[:-1]) + path.z ** 2)
    return ReturnsLikelihood(total=float(per_day.sum()), per_day=per_day, path=path)


def loglik_day(errors: Sequence[float], sigma_e: float, rho: float = 0.0) -> float:
    """
    Log-density of one equicorrelated block of pricing errors through the projections
    onto the ones vector and its complement.
    """

    errors = np.asarray(errors, dtype=float)
    n = errors.size
    if n == 0:
        return 0.0
    algebra = EquicorrAlgebra(n, rho)
    return -0.5 * (n * math.log(2.0 * math.pi * sigma_e ** 2) + algebra.log_determinant()
                   + algebra.quadratic_form(errors) / sigma_e ** 2)


def loglik_day_dense(errors: Sequence[float], sigma_e: float, rho: float = 0.0) -> float:
    errors = np.asarray(errors, dtype=float)
    n = errors.size
    if n == 0:
        return 0.0
    omega = equicorrelation_matrix(n, rho)
    sign, log_det = np.linalg.slogdet(omega)
    if sign <= 0:
        raise DomainError(f"Invalid rho (expected: positive-definite matrix for n={n}, got: {rho})")
    return -0.5 * (n * math.log(2.0 * math.pi * sigma_e ** 2) + log_det
                   + errors @ np.linalg.solve(omega, errors) / sigma_e ** 2)


def loglik_derivatives(kp: KernelParams, errors_by_day: Sequence[Sequence[float]]) -> float:
    """
    Derivative-price log-likelihood summed over days, one equicorrelated block per entry.

    :param kp: Kernel parameters (``sigma_e`` and ``rho``)
    :type kp: KernelParams
    :param errors_by_day: Pricing errors of each day; sizes may vary
    :type errors_by_day: Sequence[Sequence[float]]

    :returns: float -- Log-likelihood
    """

    sizes = [np.size(errors) for errors in errors_by_day]
    if sizes and max(sizes) > 1:
        check_rho(kp.rho, max(sizes))
    return float(sum(loglik_day(errors, kp.sigma_e, kp.rho) for errors in errors_by_day))


def _option_rows(day: int, panel: DailyPanel, instruments: Instruments, observed: np.ndarray,
                 values: np.ndarray) -> List[Dict]:
    start = int(instruments.has_vix)
    rows = []
    for index, (quote, call, vega) in enumerate(zip(panel.quotes, instruments.calls, instruments.vegas)):
        model_x, observed_x = values[start + index], observed[start + index]
        rows.append({
            "date": panel.date, "day": day, "strike": quote.strike, "dtm": quote.maturity_days,
            "maturity": call.maturity_days, "spot": panel.spot, "rate": panel.rate, "vix": panel.vix,
            "bs_delta": quote.bs_delta, "iv": quote.implied_vol, "vega": vega,
            "observed_price": quote.price, "model_price": model_x * vega / 100.0,
            "observed_x": observed_x, "model_x": model_x, "error": observed_x - model_x
        })
    return rows


def filter_sequence(spec: ModelSpec, panels: Sequence[DailyPanel], eta_path: Optional[Sequence[float]] = None,
                    h_init: Optional[float] = None) -> LikelihoodReport:
    """
    Run the joint filter: returns update the variance, the day's instruments are priced
    at :math:`(\\eta_t, h_{t+1})`, and the scaled score of the pricing errors drives
    :math:`\\eta_{t+1}`.

    :param spec: Model specification
    :type spec: ModelSpec
    :param panels: Daily panels in date order
    :type panels: Sequence[DailyPanel]
    :param eta_path: Externally supplied :math:`\\eta_t` per day, default to the filtered path
    :type eta_path: Optional[Sequence[float]]
    :param h_init: First-day variance, default to the unconditional variance
    :type h_init: Optional[float]

    :returns: LikelihoodReport -- States and likelihood components
    """

    pp, kp = spec.pp, spec.kp
    if eta_path is not None and len(eta_path) != len(panels):
        raise ValueError(f"Invalid eta path length (expected: {len(panels)}, got: {len(eta_path)})")
    if spec.uses_options:
        n_max = max((len(panel.quotes) for panel in panels), default=0)
        if n_max > 1:
            check_rho(kp.rho, n_max)

    variance = filter_physical_variance(pp, [panel.ret for panel in panels], h_init)
    h_t = variance.h[0]
    eta_prev = eta_t = kp.zeta
    days, options = [], []
    for day, panel in enumerate(panels):
        if eta_path is not None:
            eta_t = float(eta_path[day])
        z, h_next = float(variance.z[day]), float(variance.h[day + 1])

        row = {
            "date": panel.date, "ret": panel.ret, "h": h_t, "h_next": h_next, "h_star": eta_prev * h_t,
            "h_star_next": eta_t * h_next, "eta": eta_t, "z": z,
            "ll_ret": -0.5 * (LOG_2PI + math.log(h_t) + z ** 2), "ll_vix": 0.0, "ll_opt": 0.0,
            "vix": panel.vix, "vix_model": math.nan, "vix_error": math.nan, "n_options": 0,
            "gradient": 0.0, "fisher": math.nan, "score": 0.0, "score_p": math.nan, "clamped": False
        }
        score = 0.0
        instruments = spec.instruments(panel)
        if instruments.size:
            try:
                values, grads = instrument_values(pp, kp, instruments, eta_t, [h_next], nodes=spec.nodes)
                observed = panel.observed(instruments)
                errors = observed - values[0]
                start = int(instruments.has_vix)
                if instruments.has_vix:
                    row.update(vix_model=values[0, 0], vix_error=errors[0],
                               ll_vix=loglik_day(errors[:1], kp.sigma_e))
                if instruments.n_options:
                    row.update(ll_opt=loglik_day(errors[start:], kp.sigma_e, kp.rho), n_options=instruments.n_options)
                    options.extend(_option_rows(day, panel, instruments, observed, values[0]))
                if spec.variant == "SHNG":
                    context = score_context(
                        pp, kp, FilterState.from_variance(h_t, eta_prev), eta_t, instruments, errors, grads[0],
                        nodes=spec.nodes, standardize=spec.standardize_scores
                    )
                    score = context.score
                    row.update(gradient=context.gradient, fisher=context.fisher, score=score)
                    if context.standardized_score is not None:
                        row["score_p"] = context.standardized_score
            except _DAY_ERRORS as error:
                raise FilteringError(str(error), day=day) from error

        if spec.variant == "SHNG" and eta_path is None:
            eta_next, clamped = eta_update(kp, eta_t, score, spec.eta_floor)
            if clamped:
                logger.warning("Variance risk ratio clamped to floor %g on day %d", spec.eta_floor, day)
            row["clamped"] = bool(clamped)
        else:
            eta_next = kp.zeta
        days.append(row)
        h_t, eta_prev, eta_t = h_next, eta_t, eta_next

    option_columns = ["date", "day", "strike", "dtm", "maturity", "spot", "rate", "vix", "bs_delta", "iv", "vega",
                      "observed_price", "model_price", "observed_x", "model_x", "error"]
    return LikelihoodReport(spec=spec, days=pd.DataFrame(days), options=pd.DataFrame(options, columns=option_columns))


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = "BFGS"
    max_iter: int = 200
    gtol: float = 1e-5
    two_stage: bool = False
    robust_se: bool = True
    free: Optional[Tuple[str, ...]] = None
    covariance: str = "sandwich"

    def __post_init__(self) -> None:
        if self.covariance not in COVARIANCE_METHODS:
            raise ConfigError(f"Invalid covariance (expected: one of {COVARIANCE_METHODS}, got: {self.covariance!r})")


@dataclass
class FitResult:
    """
    Output of :func:`fit_mle`.
    """

    spec: ModelSpec
    names: Tuple[str, ...]
    estimates: pd.Series
    std_errors: pd.Series
    covariance: np.ndarray
    report: LikelihoodReport
    converged: bool
    message: str
    n_evaluations: int = 0
    stages: List[str] = field(default_factory=list)

    @property
    def loglik(self) -> float:
        return self.report.ll_total

    def table(self) -> pd.DataFrame:
        frame = pd.DataFrame({"parameter": list(self.names), "estimate": self.estimates.to_numpy(),
                              "std_error": self.std_errors.to_numpy()})
        components = pd.DataFrame({
            "parameter": ["ll_returns", "ll_vix", "ll_opt", "ll_total"], "std_error": math.nan,
            "estimate": [self.report.ll_returns, self.report.ll_vix, self.report.ll_opt, self.report.ll_total]
        })
        return pd.concat([frame, components], ignore_index=True)


def free_parameters(spec: ModelSpec) -> Tuple[str, ...]:
    """
    Names of the parameters estimated for a specification, physical first.
    """

    names = [] if spec.fix_omega_zero else ["omega"]
    names += ["beta", "alpha", "gamma", "lam"]
    names += ["theta", "zeta", "sigma"] if spec.variant == "SHNG" else ["zeta"]
    names.append("sigma_e")
    if spec.uses_options:
        names.append("rho")
    return tuple(names)


def get_parameter(spec: ModelSpec, name: str) -> float:
    return float(getattr(spec.pp if name in PHYSICAL_NAMES else spec.kp, name))


def with_parameters(spec: ModelSpec, names: Sequence[str], values: Sequence[float]) -> ModelSpec:
    physical = {name: float(value) for name, value in zip(names, values) if name in PHYSICAL_NAMES}
    kernel = {name: float(value) for name, value in zip(names, values) if name in KERNEL_NAMES}
    unknown = set(names) - set(physical) - set(kernel)
    if unknown:
        raise EstimationError(f"Invalid parameter names (expected: {PHYSICAL_NAMES + KERNEL_NAMES}, got: {unknown})")
    return spec.replace(pp=spec.pp.replace(**physical), kp=spec.kp.replace(**kernel))


class _Transform:
    """
    Maps constrained parameters to an unconstrained, roughly unit-scaled vector.
    """

    LOG = ("omega", "alpha", "zeta", "sigma", "sigma_e")

    def __init__(self, names: Sequence[str], start: np.ndarray, rho_lower: float):
        self.names = tuple(names)
        self.rho_lower = rho_lower
        self.scale = np.array([max(abs(value), 1.0) if name in ("gamma", "lam") else 1.0
                               for name, value in zip(self.names, start)])

    def forward(self, values: np.ndarray) -> np.ndarray:
        out = np.empty(len(self.names))
        for index, (name, value) in enumerate(zip(self.names, values)):
            if name in self.LOG:
                out[index] = math.log(value)
            elif name == "beta":
                out[index] = logit(value)
            elif name == "theta":
                out[index] = math.atanh(value)
            elif name == "rho":
                out[index] = logit((value - self.rho_lower) / (1.0 - self.rho_lower))
            else:
                out[index] = value
        return out / self.scale

    def inverse(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float) * self.scale
        out = np.empty(len(self.names))
        for index, (name, value) in enumerate(zip(self.names, x)):
            if name in self.LOG:
                out[index] = math.exp(min(value, 700.0))
            elif name == "beta":
                out[index] = expit(value)
            elif name == "theta":
                out[index] = math.tanh(value)
            elif name == "rho":
                out[index] = self.rho_lower + (1.0 - self.rho_lower) * expit(value)
            else:
                out[index] = value
        return out


def _start_values(spec: ModelSpec, names: Sequence[str]) -> np.ndarray:
    start = np.array([get_parameter(spec, name) for name in names])
    for index, name in enumerate(names):
        if name in _Transform.LOG and not start[index] > 0:
            # log-transformed parameters need an interior start
            start[index] = 1e-2 if name == "sigma" else 1e-8
        if name == "theta" and not abs(start[index]) < 1:
            raise EstimationError(f"Invalid theta start (expected: |theta| < 1, got: {start[index]})")
    return start


def _rho_lower(panels: Sequence[DailyPanel]) -> float:
    n_max = max((len(panel.quotes) for panel in panels), default=1)
    # stay inside the positive-definite range
    return -1.0 / (n_max - 1) + 1e-6 if n_max > 1 else -1.0 + 1e-6


def _optimize(objective: Callable[[np.ndarray], float], transform: _Transform, start: np.ndarray,
              config: OptimizerConfig, stage: str, trace: List[float]):
    iteration = [0]

    def callback(xk: np.ndarray, *_) -> None:
        iteration[0] += 1
        logger.info("%s iteration %d: objective %.10g", stage, iteration[0], trace[-1] if trace else math.nan)

    result = minimize(objective, transform.forward(start), method=config.method, callback=callback,
                      options={"maxiter": config.max_iter, "gtol": config.gtol})
    if not result.success:
        logger.warning("%s optimizer did not converge: %s", stage, result.message)
    return result


def robust_covariance(spec: ModelSpec, names: Sequence[str], panels: Sequence[DailyPanel],
                      h_init: Optional[float] = None, method: str = "sandwich") -> np.ndarray:
    """
    Sandwich covariance from a numerical Hessian of the log-likelihood and the
    covariance of numerically differentiated per-day scores. ``opg`` skips the Hessian
    and inverts the outer product of the per-day scores.

    Derivatives are taken with respect to parameters scaled by their estimates.
    """

    estimates = np.array([get_parameter(spec, name) for name in names])
    scale = np.where(np.abs(estimates) > 0, np.abs(estimates), 1.0)
    n_days = len(panels)

    def per_day(u: np.ndarray) -> np.ndarray:
        candidate = with_parameters(spec, names, u * scale).replace(standardize_scores=False)
        return filter_sequence(candidate, panels, h_init=h_init).per_day_loglik

    def average(u: np.ndarray) -> float:
        return float(per_day(u).sum()) / n_days

    u_hat = estimates / scale
    try:
        scores = np.atleast_2d(approx_fprime(u_hat, per_day, centered=True))
        if method == "opg":
            return np.linalg.inv(scores.T @ scores) * np.outer(scale, scale)
        hessian = approx_hess(u_hat, average)
        inverse = np.linalg.inv(hessian)
    except (SHNGError, np.linalg.LinAlgError) as error:
        logger.warning("Robust covariance unavailable: %s", error)
        return np.full((len(names), len(names)), np.nan)
    score_cov = np.cov(np.atleast_2d(scores).T)
    covariance = inverse @ np.atleast_2d(score_cov) @ inverse / n_days
    return covariance * np.outer(scale, scale)


def fit_mle(spec: ModelSpec, panels: Sequence[DailyPanel], config: OptimizerConfig = OptimizerConfig(),
            h_init: Optional[float] = None) -> FitResult:
    """
    Maximum-likelihood estimation by quasi-Newton search over transformed parameters.

    :param spec: Starting specification
    :type spec: ModelSpec
    :param panels: Daily panels
    :type panels: Sequence[DailyPanel]
    :param config: Optimizer settings, default to ``OptimizerConfig()``
    :type config: OptimizerConfig
    :param h_init: First-day variance, default to the unconditional variance
    :type h_init: Optional[float]

    :returns: FitResult -- Fitted specification, robust standard errors and the final report
    """

    if not panels:
        raise EstimationError("Invalid data (expected: at least one day, got: 0)")
    names = tuple(config.free) if config.free is not None else free_parameters(spec)
    rho_lower = _rho_lower(panels)
    n_days = len(panels)
    fast = spec.replace(standardize_scores=False)
    evaluations, trace = [0], []

    def make_objective(names_: Tuple[str, ...], transform: _Transform, base: ModelSpec,
                       returns_only: bool) -> Callable[[np.ndarray], float]:
        returns = [panel.ret for panel in panels]

        def objective(x: np.ndarray) -> float:
            evaluations[0] += 1
            try:
                candidate = with_parameters(base, names_, transform.inverse(x))
                if not candidate.pp.is_stationary:
                    return PENALTY
                if returns_only:
                    value = loglik_returns(candidate.pp, returns, h_init).total
                else:
                    value = filter_sequence(candidate, panels, h_init=h_init).ll_total
            except SHNGError:
                return PENALTY
            value = -value / n_days if math.isfinite(value) else PENALTY
            trace[:] = [value]
            return value
        return objective

    stages, current, converged, messages = [], fast, True, []
    plan = [(names, False, "joint")]
    if config.two_stage:
        plan = [(tuple(n for n in names if n in PHYSICAL_NAMES), True, "returns"),
                (tuple(n for n in names if n in KERNEL_NAMES), False, "derivatives")]
    for stage_names, returns_only, stage in plan:
        if not stage_names:
            continue
        start = _start_values(current, stage_names)
        transform = _Transform(stage_names, start, rho_lower)
        result = _optimize(make_objective(stage_names, transform, current, returns_only), transform, start,
                           config, stage, trace)
        if result.fun >= PENALTY:
            raise EstimationError(f"Invalid {stage} fit (expected: admissible optimum, got: {result.message})")
        current = with_parameters(current, stage_names, transform.inverse(result.x))
        converged &= bool(result.success)
        messages.append(f"{stage}: {result.message}")
        stages.append(stage)

    fitted = current.replace(standardize_scores=spec.standardize_scores)
    report = filter_sequence(fitted, panels, h_init=h_init)
    estimates = pd.Series([get_parameter(fitted, name) for name in names], index=list(names))
    if config.robust_se:
        covariance = robust_covariance(fitted, names, panels, h_init, config.covariance)
    else:
        covariance = np.full((len(names), len(names)), np.nan)
    with np.errstate(invalid="ignore"):
        std_errors = pd.Series(np.sqrt(np.diag(covariance)), index=list(names))
    logger.info("%s fit: log-likelihood %.6f after %d evaluations", fitted.label, report.ll_total, evaluations[0])
    return FitResult(
        spec=fitted, names=names, estimates=estimates, std_errors=std_errors, covariance=covariance,
        report=report, converged=converged, message="; ".join(messages), n_evaluations=evaluations[0],
        stages=stages
    )


def _rmse(errors: pd.Series) -> float:
    return float(np.sqrt(np.mean(np.square(errors.to_numpy(dtype=float)))))


def _partition_rows(table: str, frame: pd.DataFrame, column: str, partitions: Dict[str, Sequence[float]]) -> List[Dict]:
    rows = [{"table": table, "partition": "all", "bucket": "all", "rmse": _rmse(frame[column]),
             "count": len(frame)}] if len(frame) else []
    for partition, edges in partitions.items():
        usable = frame.dropna(subset=[partition])
        if usable.empty:
            continue
        for bucket, group in usable.groupby(bucketize(usable[partition], edges), observed=True):
            rows.append({"table": table, "partition": partition, "bucket": str(bucket),
                         "rmse": _rmse(group[column]), "count": len(group)})
    return rows


def model_implied_vols(options: pd.DataFrame) -> np.ndarray:
    """
    Black-Scholes implied volatilities of the model prices; ``nan`` where the model price
    leaves the no-arbitrage band.
    """

    ivs = np.full(len(options), np.nan)
    for index, row in enumerate(options.itertuples(index=False)):
        call = EuropeanCall(spot=row.spot, strike=row.strike, maturity_days=int(row.maturity), rate=row.rate)
        try:
            ivs[index] = bs_implied_vol(row.model_price, call)
        except PricingError:
            continue
    return ivs


def rmse_report(report: LikelihoodReport, partitions: Optional[Dict[str, Sequence[float]]] = None,
                burn_in: Optional[int] = None) -> pd.DataFrame:
    """
    Root mean squared VIX and implied-volatility errors (in points), overall and by
    delta, calendar maturity and VIX-level bucket. Empty buckets are omitted.

    :param report: Filtered report
    :type report: LikelihoodReport
    :param partitions: Bucket edges per partition, default to delta, DTM and VIX buckets
    :type partitions: Optional[Dict[str, Sequence[float]]]
    :param burn_in: Leading days to exclude, default to ``report.spec.burn_in``
    :type burn_in: Optional[int]

    :returns: pandas.DataFrame -- Columns ``table, partition, bucket, rmse, count``
    """

    partitions = {"delta": DELTA_EDGES, "dtm": DTM_EDGES, "vix": VIX_EDGES} if partitions is None else partitions
    burn_in = report.spec.burn_in if burn_in is None else burn_in
    days = report.days.iloc[burn_in:]
    rows = []

    vix = days.dropna(subset=["vix_error"])
    if len(vix):
        # VIX quotes are already decimal errors x 100
        vix = vix.assign(err=vix["vix_error"])
        rows += _partition_rows("VIX", vix, "err", {name: edges for name, edges in partitions.items() if name == "vix"})

    options = report.options[report.options["day"] >= burn_in]
    if len(options):
        options = options.assign(model_iv=model_implied_vols(options))
        failed = int(options["model_iv"].isna().sum())
        if failed:
            logger.info("Excluded %d quote(s) whose model price has no implied volatility", failed)
        options = options.dropna(subset=["model_iv"])
        options = options.assign(err=(options["model_iv"] - options["iv"]) * 100.0)
        rows += _partition_rows("IV", options, "err", partitions)
    return pd.DataFrame(rows, columns=["table", "partition", "bucket", "rmse", "count"])


def pricing_error_acf(report: LikelihoodReport, nlags: int = 20, burn_in: Optional[int] = None) -> pd.DataFrame:
    """
    Autocorrelation of the VIX pricing errors and of the daily average option pricing error.
    """

    burn_in = report.spec.burn_in if burn_in is None else burn_in
    series = {
        "vix": report.days["vix_error"].iloc[burn_in:].dropna().to_numpy(dtype=float),
        "option": report.options[report.options["day"] >= burn_in].groupby("day")["error"].mean().to_numpy(),
    }
    frame = pd.DataFrame({"lag": np.arange(nlags + 1)})
    for name, values in series.items():
        if values.size > nlags + 1 and np.var(values) > 0:
            frame[name] = acf(values, nlags=nlags, fft=True)
        else:
            frame[name] = np.nan
    return frame


def out_of_sample_loglik(report: LikelihoodReport, start: Optional[pd.Timestamp] = None,
                         end: Optional[pd.Timestamp] = None) -> pd.Series:
    """
    Derivative log-likelihood of a window under two plug-in conventions: the fitted
    :math:`(\\sigma_e, \\rho)` and values refitted to the window's pricing errors.
    """

    window = report.window(start, end)
    kp = report.spec.kp
    vix_errors = window.days["vix_error"].dropna().to_numpy(dtype=float)
    option_blocks = [group.to_numpy(dtype=float) for _, group in window.options.groupby("day")["error"]]
    pooled = np.concatenate([vix_errors] + option_blocks) if option_blocks or vix_errors.size else np.zeros(0)
    if pooled.size == 0:
        raise EstimationError("Invalid window (expected: pricing errors, got: none)")

    sigma_e = float(np.sqrt(np.mean(pooled ** 2)))
    pairs = sum(block.size * (block.size - 1) for block in option_blocks)
    rho = kp.rho
    if pairs:
        cross = sum(block.sum() ** 2 - block @ block for block in option_blocks)
        n_max = max(block.size for block in option_blocks)
        lower = -1.0 / (n_max - 1) if n_max > 1 else -1.0
        rho = float(np.clip(cross / (pairs * sigma_e ** 2), lower + 1e-6, 1.0 - 1e-6))

    def total(sigma: float, correlation: float) -> float:
        vix = sum(loglik_day([error], sigma) for error in vix_errors)
        return vix + sum(loglik_day(block, sigma, correlation) for block in option_blocks)

    return pd.Series({
        "in_sample": total(kp.sigma_e, kp.rho), "refitted": total(sigma_e, rho),
        "sigma_e_refit": sigma_e, "rho_refit": rho, "days": len(window.days)
    })


@dataclass(frozen=True)
class SampleDesign:
    """
    Option design of simulated samples: one call per maturity with strikes at
    moneyness levels measured in standard deviations of the cumulative return.
    """

    maturities: Tuple[int, ...] = (21, 42, 63, 84, 105, 126)
    moneyness: Tuple[float, ...] = (0.0, 0.25, -0.25, 0.5, -0.5, 0.75)
    spot: float = 1000.0
    start: str = "2000-01-03"
    volume: float = 100.0


def _equicorrelated_draw(rng: np.random.Generator, n: int, kp: KernelParams) -> np.ndarray:
    if n == 0:
        return np.zeros(0)
    chol = np.linalg.cholesky(equicorrelation_matrix(n, kp.rho))
    return kp.sigma_e * chol @ rng.standard_normal(n)


def simulate_sample(spec: ModelSpec, n_days: int, seed: int = 0, design: SampleDesign = SampleDesign(),
                    h_init: Optional[float] = None) -> List[DailyPanel]:
    """
    Draw returns under the physical measure and VIX and option quotes with Gaussian
    equicorrelated pricing errors from the model's own filter.

    :param spec: Data-generating specification
    :type spec: ModelSpec
    :param n_days: Number of days
    :type n_days: int
    :param seed: Seed of the Philox stream, default to ``0``
    :type seed: int
    :param design: Option design, default to ``SampleDesign()``
    :type design: SampleDesign
    :param h_init: First-day variance, default to the unconditional variance
    :type h_init: Optional[float]

    :returns: List[DailyPanel] -- Simulated panels; every day carries a VIX and, for
        option configurations, one quote per design maturity
    """

    if n_days < 1:
        raise ValueError(f"Invalid number of days (expected: >= 1, got: {n_days})")
    pp, kp = spec.pp, spec.kp
    rng = np.random.Generator(np.random.Philox(seed))
    dates = pd.bdate_range(design.start, periods=n_days)
    h_bar = pp.unconditional_variance
    h_t = h_bar if h_init is None else h_init
    eta_prev = eta_t = kp.zeta
    spot = design.spot
    panels = []
    for day in range(n_days):
        ret = pp.r + (pp.lam - 0.5) * h_t + math.sqrt(h_t) * rng.standard_normal()
        z = float(standardized_shock(pp, ret, h_t))
        h_next = max(float(variance_update(pp, h_t, z)), VARIANCE_FLOOR)
        spot *= math.exp(ret)

        calls = ()
        if spec.uses_options:
            calls = tuple(
                EuropeanCall(
                    spot=spot, maturity_days=M, rate=pp.r,
                    strike=spot * math.exp(design.moneyness[(day + j) % len(design.moneyness)] * math.sqrt(h_bar * M))
                )
                for j, M in enumerate(design.maturities)
            )
        prices = panel_call_prices(pp, kp, calls, [eta_t], [h_next], nodes=spec.nodes,
                                   tolerance=None)[0, :, 0] if calls else []
        vegas = np.array([bs_vega(call, bs_implied_vol(price, call)) for call, price in zip(calls, prices)])
        instruments = Instruments(spec.vix_maturity, calls, vegas)
        values, grads = instrument_values(pp, kp, instruments, eta_t, [h_next], nodes=spec.nodes)
        noise = np.concatenate(([kp.sigma_e * rng.standard_normal()], _equicorrelated_draw(rng, len(calls), kp)))
        observed = values[0] + noise

        quotes = []
        for index, call in enumerate(calls):
            price = vegas[index] * observed[1 + index] / 100.0
            band_low, band_high = call.intrinsic + 1e-6 * call.spot, call.spot * (1.0 - 1e-6)
            price = min(max(price, band_low), band_high)
            observed[1 + index] = 100.0 * price / vegas[index]
            iv = bs_implied_vol(price, call)
            quotes.append(OptionQuote(
                date=dates[day], strike=call.strike,
                maturity_days=int(round(call.maturity_days * CALENDAR_DAYS_PER_YEAR / TRADING_DAYS_PER_YEAR)),
                price=price, is_call=True, volume=design.volume, bs_delta=bs_delta(call, iv), implied_vol=iv
            ))
        panels.append(DailyPanel(
            date=dates[day], ret=ret, spot=spot, vix=float(observed[0]), quotes=tuple(quotes), vega_weights=vegas,
            maturities=tuple(call.maturity_days for call in calls), rate=pp.r
        ))

        score = 0.0
        if spec.variant == "SHNG":
            used = spec.instruments(panels[-1])
            keep = ([0] if used.has_vix else []) + [1 + i for i in range(used.n_options)]
            errors = observed[keep] - values[0, keep]
            context = score_context(pp, kp, FilterState.from_variance(h_t, eta_prev), eta_t, used, errors,
                                    grads[0, keep], nodes=spec.nodes)
            score = context.score
        eta_next, _ = eta_update(kp, eta_t, score, spec.eta_floor) if spec.variant == "SHNG" else (kp.zeta, False)
        h_t, eta_prev, eta_t = h_next, eta_t, eta_next
    return panels
