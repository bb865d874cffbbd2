#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from concurrent.futures import ThreadPoolExecutor
from dataclasses import (
    dataclass, replace
)
from pathlib import Path
from typing import (
    Callable, List, Literal, Optional, Sequence, Tuple, Union
)

import logging
import math
import os

import numpy as np
import pandas as pd
from scipy import stats
from scipy.integrate import trapezoid

from .exceptions import (
    ConfigError, DomainError, GridMismatchError
)
from .libs.quadrature import gauss_hermite
from .model import (
    VARIANCE_FLOOR, FilterState, KernelParams, PhysicalParams, to_physical_shock, variance_update
)
from .options import (
    EuropeanCall, certainty_equivalent, pricing_path, return_density
)
from .score import (
    ETA_FLOOR, dvix_deta, eta_update
)

logger = logging.getLogger(__name__)

# Environment variable capping the worker threads
THREADS_ENV: str = "SHNG_NUM_THREADS"
# Paths simulated per RNG stream
BLOCK_SIZE: int = 10_000

ETA_MODES: Tuple[str, ...] = ("constant", "predetermined", "ar1-gaussian", "ar1-empirical-score")
FLOOR_MODES: Tuple[str, ...] = ("clamp", "reflect", "reject")


def num_threads() -> int:
    """
    Worker threads for Monte Carlo blocks, from ``SHNG_NUM_THREADS`` or the CPU count.
    """

    value = os.environ.get(THREADS_ENV)
    if value is None:
        return os.cpu_count() or 1
    try:
        threads = int(value)
    except ValueError:
        raise ConfigError(f"Invalid {THREADS_ENV} (expected: positive integer, got: {value!r})") from None
    if threads < 1:
        raise ConfigError(f"Invalid {THREADS_ENV} (expected: positive integer, got: {value!r})")
    return threads


@dataclass(frozen=True)
class SimConfig:
    """
    Monte Carlo settings.

    :param n_paths: Number of paths
    :param horizon_days: Simulated trading days
    :param seed: Root seed; every block draws from its own Philox stream
    :param measure: ``Q`` (risk-neutral) or ``P`` (physical)
    :param eta_mode: ``constant``, ``predetermined``, ``ar1-gaussian`` or ``ar1-empirical-score``
    :param antithetic: Pair every shock with its negative
    :param eta_path: Path :math:`(\\eta_t, ..., \\eta_{t+M-1})` of the ``predetermined`` mode
    :param score_sample: Historical scores of the ``ar1-empirical-score`` mode
    :param standardize_scores: Standardize ``score_sample`` to zero mean and unit variance
    :param floor_mode: Handling of ratios below ``eta_floor``: ``clamp``, ``reflect`` or ``reject``
    :param eta_floor: Positivity floor of the variance risk ratio
    :param block_size: Paths per RNG stream
    """

    n_paths: int = 100_000
    horizon_days: int = 63
    seed: int = 0
    measure: Literal["P", "Q"] = "Q"
    eta_mode: str = "ar1-gaussian"
    antithetic: bool = True
    eta_path: Optional[Tuple[float, ...]] = None
    score_sample: Optional[Tuple[float, ...]] = None
    standardize_scores: bool = True
    floor_mode: str = "clamp"
    eta_floor: float = ETA_FLOOR
    block_size: int = BLOCK_SIZE

    def __post_init__(self) -> None:
        if self.n_paths < 1:
            raise ConfigError(f"Invalid n_paths (expected: >= 1, got: {self.n_paths})")
        if self.horizon_days < 1:
            raise ConfigError(f"Invalid horizon_days (expected: >= 1, got: {self.horizon_days})")
        if self.measure not in ("P", "Q"):
            raise ConfigError(f"Invalid measure (expected: 'P' or 'Q', got: {self.measure!r})")
        if self.eta_mode not in ETA_MODES:
            raise ConfigError(f"Invalid eta_mode (expected: {ETA_MODES}, got: {self.eta_mode!r})")
        if self.floor_mode not in FLOOR_MODES:
            raise ConfigError(f"Invalid floor_mode (expected: {FLOOR_MODES}, got: {self.floor_mode!r})")
        if self.block_size < 2:
            raise ConfigError(f"Invalid block_size (expected: >= 2, got: {self.block_size})")
        if self.eta_mode == "predetermined" and (self.eta_path is None or len(self.eta_path) < self.horizon_days):
            raise ConfigError(f"Invalid eta_path (expected: >= {self.horizon_days} values for the predetermined mode)")
        if self.eta_mode == "ar1-empirical-score" and (self.score_sample is None or len(self.score_sample) < 2):
            raise ConfigError("Invalid score_sample (expected: >= 2 values for the empirical-score mode)")

    def replace(self, **changes) -> "SimConfig":
        return replace(self, **changes)


def load_score_sample(path: Union[str, Path]) -> Tuple[float, ...]:
    """
    Read a historical score sample, one float per line.
    """

    values = np.loadtxt(path, ndmin=1, comments="#")
    if values.size < 2 or not np.all(np.isfinite(values)):
        raise ConfigError(f"Invalid score sample (expected: >= 2 finite values, got: {values.size} in {path})")
    return tuple(float(value) for value in values)


@dataclass(frozen=True)
class SimulationResult:
    """
    Simulated panel: ``returns``, ``h``, ``h_star`` and ``eta`` have shape ``(n_paths, horizon)``,
    column ``k`` holding :math:`R_{t+k+1}`, :math:`h_{t+k+1}`, :math:`h^*_{t+k+1}` and :math:`\\eta_{t+k}`.
    """

    returns: np.ndarray
    h: np.ndarray
    h_star: np.ndarray
    eta: np.ndarray
    valid: np.ndarray
    n_clamped: int = 0
    n_reflected: int = 0
    n_rejected: int = 0

    @property
    def n_paths(self) -> int:
        return self.returns.shape[0]

    def cumulative_returns(self, M: Optional[int] = None) -> np.ndarray:
        M = self.returns.shape[1] if M is None else M
        return self.returns[self.valid, :M].sum(axis=1)


@dataclass(frozen=True)
class McEstimate:
    value: float
    se: float
    n: int


@dataclass(frozen=True)
class DensityEstimate:
    grid: np.ndarray
    density: np.ndarray
    mean: float
    variance: float
    skewness: float
    kurtosis: float

    @property
    def mass(self) -> float:
        return float(trapezoid(self.density, self.grid))


@dataclass(frozen=True)
class DensityComparison:
    sup_norm: float
    l1: float


def _block_sizes(cfg: SimConfig) -> List[int]:
    full, rest = divmod(cfg.n_paths, cfg.block_size)
    return [cfg.block_size] * full + ([rest] if rest else [])


def _shocks(rng: np.random.Generator, n: int, M: int, antithetic: bool) -> np.ndarray:
    if not antithetic:
        return rng.standard_normal((n, M))
    half = rng.standard_normal((n // 2, M))
    shocks = np.vstack((half, -half))
    if n % 2:
        shocks = np.vstack((shocks, rng.standard_normal((1, M))))
    return shocks


def _score_draws(cfg: SimConfig) -> Optional[np.ndarray]:
    if cfg.score_sample is None:
        return None
    sample = np.asarray(cfg.score_sample, dtype=float)
    if cfg.standardize_scores:
        sample = (sample - sample.mean()) / sample.std()
    return sample


def _simulate_block(seed: np.random.SeedSequence, n: int, cfg: SimConfig, pp: PhysicalParams, kp: KernelParams,
                    state0: FilterState) -> SimulationResult:
    rng = np.random.Generator(np.random.Philox(seed))
    M = cfg.horizon_days
    z = _shocks(rng, n, M, cfg.antithetic)
    eps = None
    if cfg.eta_mode == "ar1-gaussian":
        eps = _shocks(rng, n, M, cfg.antithetic)
    elif cfg.eta_mode == "ar1-empirical-score":
        eps = rng.choice(_score_draws(cfg), size=(n, M), replace=True)

    returns, h_path, h_star_path, eta_path = (np.empty((n, M)) for _ in range(4))
    valid = np.ones(n, dtype=bool)
    clamped = reflected = 0
    h = np.full(n, state0.h_next)
    eta = np.full(n, cfg.eta_path[0] if cfg.eta_mode == "predetermined" else state0.eta)
    for k in range(M):
        h_star = eta * h
        if cfg.measure == "Q":
            returns[:, k] = pp.r - 0.5 * h_star + np.sqrt(h_star) * z[:, k]
            shock = to_physical_shock(pp, z[:, k], h, eta)
        else:
            returns[:, k] = pp.r + (pp.lam - 0.5) * h + np.sqrt(h) * z[:, k]
            shock = z[:, k]
        h_path[:, k], h_star_path[:, k], eta_path[:, k] = h, h_star, eta
        h = np.maximum(variance_update(pp, h, shock), VARIANCE_FLOOR)

        if cfg.eta_mode == "constant":
            continue
        if cfg.eta_mode == "predetermined":
            eta = np.full(n, cfg.eta_path[min(k + 1, len(cfg.eta_path) - 1)])
            continue
        eta = (1.0 - kp.theta) * kp.zeta + kp.theta * eta + kp.sigma * eps[:, k]
        below = eta < cfg.eta_floor
        if not below.any():
            continue
        if cfg.floor_mode == "reflect":
            reflected += int(below.sum())
            eta = np.where(below, 2.0 * cfg.eta_floor - eta, eta)
            below = eta < cfg.eta_floor
        elif cfg.floor_mode == "reject":
            valid &= ~below
        clamped += int(below.sum()) if cfg.floor_mode != "reject" else 0
        eta = np.maximum(eta, cfg.eta_floor)
    return SimulationResult(returns=returns, h=h_path, h_star=h_star_path, eta=eta_path, valid=valid,
                            n_clamped=clamped, n_reflected=reflected, n_rejected=int((~valid).sum()))


def _map_blocks(cfg: SimConfig, pp: PhysicalParams, kp: KernelParams, state0: FilterState,
                reducer: Callable[[SimulationResult], object]) -> List[object]:
    sizes = _block_sizes(cfg)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))

    def run(args: Tuple[np.random.SeedSequence, int]) -> Tuple[object, Tuple[int, int, int, int]]:
        block = _simulate_block(args[0], args[1], cfg, pp, kp, state0)
        counts = (block.n_paths * cfg.horizon_days, block.n_clamped, block.n_reflected, block.n_rejected)
        return reducer(block), counts

    with ThreadPoolExecutor(max_workers=min(num_threads(), len(sizes))) as pool:
        results = list(pool.map(run, zip(seeds, sizes)))
    steps, clamped, reflected, rejected = np.sum([counts for _, counts in results], axis=0)
    if clamped or reflected or rejected:
        logger.info("Variance risk ratio floor hits: %d clamped, %d reflected, %d rejected paths (%.3g%% of steps)",
                    clamped, reflected, rejected, 100.0 * (clamped + reflected) / steps)
    return [value for value, _ in results]


def simulate(cfg: SimConfig, pp: PhysicalParams, kp: KernelParams, state0: FilterState) -> SimulationResult:
    """
    Simulate returns, variances and variance risk ratios.

    :param cfg: Simulation settings
    :type cfg: SimConfig
    :param pp: Physical parameters
    :type pp: PhysicalParams
    :param kp: Kernel parameters
    :type kp: KernelParams
    :param state0: Starting state, :math:`h_{t+1}` and :math:`\\eta_t`
    :type state0: FilterState

    :returns: SimulationResult -- Paths of all blocks in seed order
    """

    blocks = _map_blocks(cfg, pp, kp, state0, lambda block: block)
    return SimulationResult(
        returns=np.vstack([block.returns for block in blocks]), h=np.vstack([block.h for block in blocks]),
        h_star=np.vstack([block.h_star for block in blocks]), eta=np.vstack([block.eta for block in blocks]),
        valid=np.concatenate([block.valid for block in blocks]),
        n_clamped=sum(block.n_clamped for block in blocks), n_reflected=sum(block.n_reflected for block in blocks),
        n_rejected=sum(block.n_rejected for block in blocks)
    )


def _units(values: np.ndarray, valid: np.ndarray, antithetic: bool) -> np.ndarray:
    # antithetic pairs (i, i + n//2) are averaged into one independent unit
    if not antithetic:
        return values[valid]
    half = values.size // 2
    paired = valid[:half] & valid[half:2 * half]
    units = 0.5 * (values[:half] + values[half:2 * half])[paired]
    if values.size % 2 and valid[-1]:
        units = np.append(units, values[-1])
    return units


def _estimate(cfg: SimConfig, pp: PhysicalParams, kp: KernelParams, state0: FilterState,
              statistic: Callable[[SimulationResult], np.ndarray]) -> McEstimate:
    units = np.concatenate(_map_blocks(
        cfg, pp, kp, state0, lambda block: _units(statistic(block), block.valid, cfg.antithetic)
    ))
    if units.size < 2:
        raise DomainError(f"Invalid simulation (expected: >= 2 usable paths, got: {units.size})")
    return McEstimate(value=float(units.mean()), se=float(units.std(ddof=1) / math.sqrt(units.size)), n=units.size)


def _check_horizon(cfg: SimConfig, M: int) -> None:
    if M > cfg.horizon_days:
        raise ConfigError(f"Invalid horizon (expected: >= {M} days, got: {cfg.horizon_days})")


def mc_option_price(cfg: SimConfig, pp: PhysicalParams, kp: KernelParams, call: EuropeanCall,
                    state0: FilterState) -> McEstimate:
    """
    Discounted mean call payoff under the risk-neutral measure.

    :returns: McEstimate -- Price, standard error and number of independent units
    """

    if cfg.measure != "Q":
        raise ConfigError(f"Invalid measure (expected: 'Q' for pricing, got: {cfg.measure!r})")
    if not math.isclose(call.rate, pp.r, rel_tol=0.0, abs_tol=1e-15):
        raise DomainError(f"Invalid call rate (expected: model rate {pp.r}, got: {call.rate})")
    M = call.maturity_days
    _check_horizon(cfg, M)

    def payoff(block: SimulationResult) -> np.ndarray:
        terminal = call.spot * np.exp(block.returns[:, :M].sum(axis=1))
        return call.discount * np.maximum(terminal - call.strike, 0.0)
    return _estimate(cfg, pp, kp, state0, payoff)


def mc_martingale(cfg: SimConfig, pp: PhysicalParams, kp: KernelParams, state0: FilterState, M: int) -> McEstimate:
    """
    Mean of :math:`e^{-rM}S_{t+M}/S_t`.
    """

    _check_horizon(cfg, M)
    return _estimate(cfg, pp, kp, state0, lambda block: np.exp(block.returns[:, :M].sum(axis=1) - pp.r * M))


def mc_expected_variance_sum(cfg: SimConfig, pp: PhysicalParams, kp: KernelParams, state0: FilterState,
                             M: int) -> McEstimate:
    """
    Mean of :math:`\\sum_{k=1}^{M} h^*_{t+k}`, the quantity the VIX radicand approximates.
    """

    _check_horizon(cfg, M)
    return _estimate(cfg, pp, kp, state0, lambda block: block.h_star[:, :M].sum(axis=1))


def _moments_from_sums(sums: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    n = sums[0]
    m1, r2, r3, r4 = sums[1] / n, sums[2] / n, sums[3] / n, sums[4] / n
    m2 = r2 - m1 ** 2
    m3 = r3 - 3.0 * m1 * r2 + 2.0 * m1 ** 3
    m4 = r4 - 4.0 * m1 * r3 + 6.0 * m1 ** 2 * r2 - 3.0 * m1 ** 4
    return m3 / m2 ** 1.5, m4 / m2 ** 2


def term_structure_moments(cfg: SimConfig, pp: PhysicalParams, kp: KernelParams, eta_level: float,
                           max_days: int = 126, state0: Optional[FilterState] = None) -> pd.DataFrame:
    """
    Skewness and kurtosis of cumulative returns for horizons ``1..max_days`` with
    delete-one-block jackknife standard errors.

    :param eta_level: Starting variance risk ratio
    :type eta_level: float
    :param max_days: Longest horizon, default to ``126``
    :type max_days: int
    :param state0: Starting state, default to the unconditional physical variance at ``eta_level``
    :type state0: Optional[FilterState]

    :returns: pandas.DataFrame -- Columns ``horizon, skewness, kurtosis, skewness_se, kurtosis_se``
    """

    if cfg.measure != "Q":
        raise ConfigError(f"Invalid measure (expected: 'Q', got: {cfg.measure!r})")
    cfg = cfg.replace(horizon_days=max_days)
    state0 = FilterState.from_variance(pp.unconditional_variance, eta_level) if state0 is None else state0

    def power_sums(block: SimulationResult) -> np.ndarray:
        cumulative = np.cumsum(block.returns[block.valid], axis=1)
        return np.stack([np.full(max_days, cumulative.shape[0], dtype=float)]
                        + [np.sum(cumulative ** p, axis=0) for p in range(1, 5)])

    blocks = np.array(_map_blocks(cfg, pp, kp, state0, power_sums))
    skewness, kurtosis = _moments_from_sums(blocks.sum(axis=0))
    n_blocks = blocks.shape[0]
    skew_se = kurt_se = np.full(max_days, np.nan)
    if n_blocks > 1:
        leave_out = [_moments_from_sums(blocks.sum(axis=0) - blocks[g]) for g in range(n_blocks)]
        skews = np.array([item[0] for item in leave_out])
        kurts = np.array([item[1] for item in leave_out])
        factor = (n_blocks - 1) / n_blocks
        skew_se = np.sqrt(factor * np.sum((skews - skews.mean(axis=0)) ** 2, axis=0))
        kurt_se = np.sqrt(factor * np.sum((kurts - kurts.mean(axis=0)) ** 2, axis=0))
    return pd.DataFrame({"horizon": np.arange(1, max_days + 1), "skewness": skewness, "kurtosis": kurtosis,
                         "skewness_se": skew_se, "kurtosis_se": kurt_se})


def mc_density(cfg: SimConfig, pp: PhysicalParams, kp: KernelParams, state0: FilterState, M: int,
               grid: Sequence[float]) -> DensityEstimate:
    """
    Gaussian-kernel density of the simulated ``M``-day cumulative return.
    """

    _check_horizon(cfg, M)
    grid = np.asarray(grid, dtype=float)
    values = np.concatenate(_map_blocks(cfg, pp, kp, state0, lambda block: block.cumulative_returns(M)))
    return DensityEstimate(
        grid=grid, density=stats.gaussian_kde(values)(grid), mean=float(values.mean()), variance=float(values.var()),
        skewness=float(stats.skew(values)), kurtosis=float(stats.kurtosis(values, fisher=False))
    )


def model_density(pp: PhysicalParams, kp: KernelParams, state0: FilterState, M: int, grid: Sequence[float],
                  sigma2: Optional[float] = None, nodes: int = 64) -> DensityEstimate:
    """
    Cumulative-return density of the certainty-equivalent model: the predetermined
    expected path at :math:`\\tilde h^* = h^* + \\psi`.
    """

    grid = np.asarray(grid, dtype=float)
    compensated = certainty_equivalent(pp, kp, state0.eta, state0.h_star_next, M, sigma2)
    density = return_density(pp, pricing_path(kp, state0.eta, M), float(compensated.h_tilde), M, grid, nodes=nodes)
    mass = trapezoid(density, grid)
    mean = trapezoid(grid * density, grid) / mass
    central = [trapezoid((grid - mean) ** p * density, grid) / mass for p in (2, 3, 4)]
    return DensityEstimate(grid=grid, density=density, mean=float(mean), variance=float(central[0]),
                           skewness=float(central[1] / central[0] ** 1.5), kurtosis=float(central[2] / central[0] ** 2))


def density_compare(approx: DensityEstimate, mc: DensityEstimate) -> DensityComparison:
    """
    Sup-norm and L1 distance of two densities on a common grid.
    """

    if approx.grid.shape != mc.grid.shape or not np.allclose(approx.grid, mc.grid, rtol=0.0, atol=1e-12):
        raise GridMismatchError(f"Invalid grids (expected: identical, got: {approx.grid.size} and {mc.grid.size} points)")
    gap = np.abs(approx.density - mc.density)
    return DensityComparison(sup_norm=float(gap.max()), l1=float(trapezoid(gap, approx.grid)))


def simulate_vix_scores(pp: PhysicalParams, kp: KernelParams, n_paths: int, n_days: int, seed: int = 0,
                        M: int = 21, nodes: int = 32, eta_floor: float = ETA_FLOOR) -> np.ndarray:
    """
    Scaled scores of a VIX-only score-driven model simulated under the risk-neutral measure
    with Gaussian VIX pricing errors.

    :returns: numpy.ndarray -- Scores of shape ``(n_paths, n_days)``
    """

    rng = np.random.Generator(np.random.Philox(seed))
    shocks, weights = gauss_hermite(nodes)
    h = np.full(n_paths, pp.unconditional_variance)
    eta_prev = eta = np.full(n_paths, kp.zeta)
    scores = np.empty((n_paths, n_days))
    for day in range(n_days):
        z = to_physical_shock(pp, rng.standard_normal(n_paths), h, eta_prev)
        h_next = np.maximum(variance_update(pp, h, z), VARIANCE_FLOOR)
        error = kp.sigma_e * rng.standard_normal(n_paths)
        gradient = error * dvix_deta(pp, kp, eta, h_next, M) / kp.sigma_e ** 2
        node_shocks = to_physical_shock(pp, shocks[None, :], h[:, None], eta_prev[:, None])
        node_h = np.maximum(variance_update(pp, h[:, None], node_shocks), VARIANCE_FLOOR)
        fisher = dvix_deta(pp, kp, eta[:, None], node_h, M) ** 2 @ weights / kp.sigma_e ** 2
        scores[:, day] = gradient / np.sqrt(fisher)
        eta_next, _ = eta_update(kp, eta, scores[:, day], eta_floor)
        h, eta_prev, eta = h_next, eta, eta_next
    return scores
