#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from dataclasses import dataclass
from typing import (
    Literal, Optional, Sequence, Tuple, Union
)

import logging
import math

import numpy as np

from .exceptions import (
    DomainError, PricingError
)
from .libs import black_scholes
from .libs.quadrature import (
    DEFAULT_NODES, gauss_hermite, gauss_laguerre
)
from .model import (
    ETA_FLOOR, KernelParams, PhysicalParams
)
from .utils import (
    TRADING_DAYS_PER_YEAR, ensure_maturity, ensure_positive
)
from .vix import (
    VixTerms, expected_variance_path, vix_terms_closed
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Gaussian width of the Fourier integrand on the Laguerre axis
FOURIER_WIDTH: float = 8.0
# Relative change between node doublings that ends the Fourier refinement
FOURIER_TOLERANCE: float = 1e-8
# Node count at which the Fourier refinement stops
MAX_FOURIER_NODES: int = 128
# Price level, relative to spot, under which refinement changes are measured absolutely
PRICE_FLOOR: float = 1e-8
# Gauss-Hermite scenarios of the variance risk ratio path in the mixture price
MIXTURE_NODES: int = 8
# Longest maturity priced (trading days)
MAX_MATURITY: int = 126
# Allowed excursion of P1, P2 outside [0, 1] before warning
PROBABILITY_TOLERANCE: float = 1e-8
# Allowed excursion of a call price outside its no-arbitrage band, relative to spot
BAND_TOLERANCE: float = 1e-4


@dataclass(frozen=True)
class EuropeanCall:
    """
    European call on the index.

    :param spot: Index level :math:`S_t`
    :param strike: Strike :math:`K`
    :param maturity_days: Trading days to maturity :math:`M`
    :param rate: Daily risk-free rate
    """

    spot: float
    strike: float
    maturity_days: int
    rate: float = 0.0

    def __post_init__(self) -> None:
        ensure_positive("spot", self.spot)
        ensure_positive("strike", self.strike)
        maturity = ensure_maturity(self.maturity_days)
        if maturity > MAX_MATURITY:
            raise DomainError(f"Invalid maturity (expected: <= {MAX_MATURITY} trading days, got: {maturity})")

    @property
    def tau(self) -> float:
        return self.maturity_days / TRADING_DAYS_PER_YEAR

    @property
    def annual_rate(self) -> float:
        return self.rate * TRADING_DAYS_PER_YEAR

    @property
    def discount(self) -> float:
        return math.exp(-self.rate * self.maturity_days)

    @property
    def intrinsic(self) -> float:
        return max(0.0, self.spot - self.strike * self.discount)


@dataclass(frozen=True)
class MgfCoeffs:
    a_coef: ArrayLike
    b_coef: ArrayLike
    maturity_index: int
    eta_path: np.ndarray

    def evaluate(self, h_star_next: float) -> ArrayLike:
        return np.exp(self.a_coef + self.b_coef * h_star_next)


@dataclass(frozen=True)
class CompensatedVol:
    h_star: ArrayLike
    psi: ArrayLike
    h_tilde: ArrayLike


def expected_eta_path(kp: KernelParams, eta_t: float, M: int) -> np.ndarray:
    """
    Expected variance risk ratios :math:`E_t[\\eta_{t+j}] = \\zeta + \\theta^j(\\eta_t - \\zeta)`, ``j = 1..M``.
    """

    M = ensure_maturity(M)
    j = np.arange(1, M + 1)
    return kp.zeta + kp.theta ** j * (eta_t - kp.zeta)


def pricing_path(kp: KernelParams, eta_t: float, M: int) -> np.ndarray:
    """
    Path :math:`(\\eta_t, E_t\\eta_{t+1}, ..., E_t\\eta_{t+M-1})` consumed by the MGF recursion.
    """

    return np.concatenate(([eta_t], expected_eta_path(kp, eta_t, M)[:M - 1]))


def _mgf_recursion(pp: PhysicalParams, eta_paths: np.ndarray, maturities: np.ndarray, s: np.ndarray,
                   rates: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # one row per (path, maturity); columns of s are MGF arguments
    eta_paths = np.atleast_2d(np.asarray(eta_paths, dtype=float))
    maturities = np.asarray(maturities, dtype=int)
    s = np.asarray(s, dtype=complex)
    rates = np.asarray(rates, dtype=float)[:, None]
    if np.any(eta_paths[:, :maturities.max()] <= 0):
        raise DomainError("Invalid eta path (expected: all entries > 0)")
    rows = np.arange(maturities.size)
    shift = pp.gamma + pp.lam - 0.5
    a = s * rates
    b = 0.5 * (s * s - s)
    with np.errstate(all="ignore"):
        for m in range(1, int(maturities.max())):
            k = maturities - m
            active = (k >= 1)[:, None]
            k = np.maximum(k, 1)
            eta_k, eta_prev = eta_paths[rows, k][:, None], eta_paths[rows, k - 1][:, None]
            alpha_star = pp.alpha * eta_k * eta_prev
            gamma_prev = shift / eta_prev + 0.5
            denominator = 1.0 - 2.0 * alpha_star * b
            if np.any(active & ~(denominator.real > 0)):
                raise PricingError("Invalid MGF recursion (expected: Re(1 - 2*alpha_star*B) > 0)", step=m)
            a_next = a + s * rates + b * pp.omega * eta_k - 0.5 * np.log(denominator)
            b_next = (s * (gamma_prev - 0.5) - 0.5 * gamma_prev ** 2 + pp.beta * eta_k / eta_prev * b
                      + (s - gamma_prev) ** 2 / (2.0 * denominator))
            a = np.where(active, a_next, a)
            b = np.where(active, b_next, b)
    return a, b


def mgf_coeffs(pp: PhysicalParams, eta_path: Sequence[float], s: Union[complex, np.ndarray], M: int) -> MgfCoeffs:
    """
    Affine coefficients of the risk-neutral MGF of the cumulative return
    :math:`\\sum_{k=1}^{M} R_{t+k}`, :math:`g^*(s) = \\exp(\\mathcal{A} + \\mathcal{B} h^*_{t+1})`.

    :param pp: Physical parameters
    :type pp: PhysicalParams
    :param eta_path: :math:`(\\eta_t, \\eta_{t+1}, ..., \\eta_{t+M-1})`
    :type eta_path: Sequence[float]
    :param s: MGF argument(s)
    :type s: Union[complex, numpy.ndarray]
    :param M: Maturity in trading days
    :type M: int

    :returns: MgfCoeffs -- Coefficients at ``m = M``
    """

    M = ensure_maturity(M)
    eta_path = np.asarray(eta_path, dtype=float)
    if eta_path.size < M:
        raise ValueError(f"Invalid eta path length (expected: >= {M}, got: {eta_path.size})")
    s_row = np.atleast_1d(np.asarray(s, dtype=complex))[None, :]
    a, b = _mgf_recursion(pp, eta_path[None, :M], np.array([M]), s_row, np.array([pp.r]))
    if np.ndim(s) == 0:
        return MgfCoeffs(a_coef=complex(a[0, 0]), b_coef=complex(b[0, 0]), maturity_index=M, eta_path=eta_path[:M])
    return MgfCoeffs(a_coef=a[0], b_coef=b[0], maturity_index=M, eta_path=eta_path[:M])


def _fourier_probabilities(pp: PhysicalParams, spots: np.ndarray, strikes: np.ndarray, maturities: np.ndarray,
                           rates: np.ndarray, eta_paths: np.ndarray, h_tilde: np.ndarray,
                           scale_variance: np.ndarray, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    # rows index quotes, h_tilde columns index variance states
    x, weights = gauss_laguerre(nodes)
    width = FOURIER_WIDTH * np.sqrt(scale_variance)[:, None]
    phi = x[None, :] / width
    s = np.concatenate((1j * phi, 1.0 + 1j * phi), axis=1)
    a, b = _mgf_recursion(pp, eta_paths, maturities, s, rates)
    n = x.size
    with np.errstate(over="ignore", invalid="ignore"):
        g = np.exp(a[:, None, :] + b[:, None, :] * h_tilde[:, :, None])
    log_moneyness = np.log(strikes / spots)[:, None, None]
    kernel = np.exp(-1j * phi[:, None, :] * log_moneyness) / (1j * phi[:, None, :])
    jacobian = weights[None, None, :] / width[:, :, None]
    with np.errstate(invalid="ignore"):
        second = np.sum(jacobian * (kernel * g[..., :n]).real, axis=-1)
        first = np.sum(jacobian * (kernel * g[..., n:]).real, axis=-1)
    discount = np.exp(-rates * maturities)[:, None]
    return 0.5 + discount * first / np.pi, 0.5 + second / np.pi


def _fourier_prices(pp: PhysicalParams, spots: np.ndarray, strikes: np.ndarray, maturities: np.ndarray,
                    rates: np.ndarray, eta_paths: np.ndarray, h_tilde: np.ndarray, scale_variance: np.ndarray,
                    nodes: int, tolerance: Optional[float] = FOURIER_TOLERANCE) -> np.ndarray:
    # a tolerance doubles the node count until successive prices agree; None keeps the grid fixed
    discount = np.exp(-rates * maturities)[:, None]

    def evaluate(n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        p_one, p_two = _fourier_probabilities(pp, spots, strikes, maturities, rates, eta_paths, h_tilde,
                                              scale_variance, n)
        return p_one, p_two, spots[:, None] * p_one - strikes[:, None] * discount * p_two

    p_one, p_two, prices = evaluate(nodes)
    change = math.nan
    while tolerance is not None and nodes < MAX_FOURIER_NODES:
        nodes = min(2 * nodes, MAX_FOURIER_NODES)
        previous = prices
        p_one, p_two, prices = evaluate(nodes)
        with np.errstate(invalid="ignore"):
            change = float(np.max(np.abs(prices - previous)
                                  / np.maximum(np.abs(prices), PRICE_FLOOR * spots[:, None])))
        if change < tolerance:
            break
    else:
        if tolerance is not None and not math.isnan(change):
            logger.debug("Fourier refinement stopped at %d nodes with relative change %.3g", nodes, change)

    if not (np.all(np.isfinite(p_one)) and np.all(np.isfinite(p_two))):
        raise PricingError("Invalid Fourier integral (expected: finite, got: overflow); increase nodes")
    outside = ((p_one < -PROBABILITY_TOLERANCE) | (p_one > 1 + PROBABILITY_TOLERANCE)
               | (p_two < -PROBABILITY_TOLERANCE) | (p_two > 1 + PROBABILITY_TOLERANCE))
    if np.any(outside):
        logger.warning("Exercise probabilities outside [0, 1] for %d quote state(s)", int(outside.sum()))
    band = BAND_TOLERANCE * spots[:, None]
    intrinsic = np.maximum(spots[:, None] - strikes[:, None] * discount, 0.0)
    if np.any(prices < intrinsic - band) or np.any(prices > spots[:, None] + band):
        raise PricingError(
            f"Invalid call price (expected: within no-arbitrage band, got: {prices.min()}..{prices.max()}); "
            f"increase nodes above {nodes}"
        )
    return prices


def price_call_predetermined(pp: PhysicalParams, call: EuropeanCall, eta_path: Sequence[float],
                             h_star_next: float, nodes: int = DEFAULT_NODES,
                             scale_variance: Optional[float] = None,
                             tolerance: Optional[float] = FOURIER_TOLERANCE) -> float:
    """
    Call price under a predetermined variance risk ratio path.

    :param pp: Physical parameters
    :type pp: PhysicalParams
    :param call: Contract
    :type call: EuropeanCall
    :param eta_path: :math:`(\\eta_t, ..., \\eta_{t+M-1})`
    :type eta_path: Sequence[float]
    :param h_star_next: Risk-neutral next-day variance
    :type h_star_next: float
    :param nodes: Gauss-Laguerre nodes, default to ``32``
    :type nodes: int
    :param scale_variance: Variance fixing the frequency scale, default to :math:`M h^*_{t+1}`
    :type scale_variance: Optional[float]
    :param tolerance: Relative change ending the node doubling, ``None`` for a fixed grid
    :type tolerance: Optional[float]

    :returns: float -- Price
    """

    M = call.maturity_days
    h_star_next = ensure_positive("h_star_next", h_star_next)
    eta_path = np.asarray(eta_path, dtype=float)
    if eta_path.size < M:
        raise ValueError(f"Invalid eta path length (expected: >= {M}, got: {eta_path.size})")
    scale_variance = M * h_star_next if scale_variance is None else scale_variance
    prices = _fourier_prices(
        pp, np.array([call.spot]), np.array([call.strike]), np.array([M]), np.array([call.rate]),
        eta_path[None, :M], np.array([[h_star_next]]), np.array([scale_variance]), nodes, tolerance
    )
    return float(prices[0, 0])


def price_put_predetermined(pp: PhysicalParams, call: EuropeanCall, eta_path: Sequence[float],
                            h_star_next: float, nodes: int = DEFAULT_NODES,
                            tolerance: Optional[float] = FOURIER_TOLERANCE) -> float:
    price = price_call_predetermined(pp, call, eta_path, h_star_next, nodes=nodes, tolerance=tolerance)
    return price + call.strike * call.discount - call.spot


def compensation_psi(vix_terms: VixTerms, sigma2: float, M: Optional[int] = None) -> ArrayLike:
    """
    Certainty-equivalent variance adjustment :math:`\\psi = a_2\\sigma^2/a_3`.
    """

    if M is not None and M != vix_terms.maturity:
        raise ValueError(f"Invalid maturity (expected: {vix_terms.maturity}, got: {M})")
    if np.any(~(np.asarray(vix_terms.a3) > 0)):
        raise DomainError(f"Invalid a3 (expected: > 0, got: {vix_terms.a3})")
    return vix_terms.a2 * sigma2 / vix_terms.a3


def certainty_equivalent(pp: PhysicalParams, kp: KernelParams, eta_t: ArrayLike, h_star_next: ArrayLike,
                         M: int, sigma2: Optional[float] = None) -> CompensatedVol:
    sigma2 = kp.sigma2 if sigma2 is None else sigma2
    psi = compensation_psi(vix_terms_closed(pp, kp, eta_t, M), sigma2)
    return CompensatedVol(h_star=h_star_next, psi=psi, h_tilde=h_star_next + psi)


def panel_call_prices(pp: PhysicalParams, kp: KernelParams, calls: Sequence[EuropeanCall],
                      etas: Sequence[float], h_next: Sequence[float], sigma2: Optional[float] = None,
                      nodes: int = DEFAULT_NODES, scale_variance: Optional[Sequence[float]] = None,
                      tolerance: Optional[float] = FOURIER_TOLERANCE) -> np.ndarray:
    """
    Certainty-equivalent call prices of a panel of quotes for several current variance
    risk ratios and several physical next-day variances, sharing one MGF recursion per
    (ratio, quote) pair.

    :param pp: Physical parameters
    :type pp: PhysicalParams
    :param kp: Kernel parameters
    :type kp: KernelParams
    :param calls: Contracts
    :type calls: Sequence[EuropeanCall]
    :param etas: Candidate values of :math:`\\eta_t`
    :type etas: Sequence[float]
    :param h_next: Physical next-day variances :math:`h_{t+1}`
    :type h_next: Sequence[float]
    :param sigma2: Innovation variance, default to ``kp.sigma ** 2``
    :type sigma2: Optional[float]
    :param nodes: Gauss-Laguerre nodes, default to ``32``
    :type nodes: int
    :param scale_variance: Per-quote frequency scale, default to :math:`M\\tilde h^*` at the first ratio and mean variance
    :type scale_variance: Optional[Sequence[float]]
    :param tolerance: Relative change ending the node doubling, ``None`` for a fixed grid
    :type tolerance: Optional[float]

    :returns: numpy.ndarray -- Prices of shape ``(len(etas), len(calls), len(h_next))``
    """

    sigma2 = kp.sigma2 if sigma2 is None else sigma2
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    h_next = np.atleast_1d(np.asarray(h_next, dtype=float))
    if np.any(~(etas > 0)):
        raise DomainError(f"Invalid eta (expected: > 0, got: {etas})")
    maturities = np.array([call.maturity_days for call in calls], dtype=int)
    unique = np.unique(maturities)
    psi = np.array([[compensation_psi(vix_terms_closed(pp, kp, float(eta), int(M)), sigma2) for M in unique]
                    for eta in etas])
    psi = psi[:, np.searchsorted(unique, maturities)]
    length = int(maturities.max())
    paths = np.array([pricing_path(kp, float(eta), length) for eta in etas])

    n_eta, n_calls = etas.size, maturities.size
    eta_paths = np.repeat(paths, n_calls, axis=0)
    h_tilde = (etas[:, None, None] * h_next[None, None, :] + psi[:, :, None]).reshape(n_eta * n_calls, -1)
    if scale_variance is None:
        scale_variance = maturities * (etas[0] * h_next.mean() + psi[0])
    scale = np.tile(np.asarray(scale_variance, dtype=float), n_eta)
    tile = lambda values: np.tile(np.asarray(values, dtype=float), n_eta)
    prices = _fourier_prices(
        pp, tile([c.spot for c in calls]), tile([c.strike for c in calls]), np.tile(maturities, n_eta),
        tile([c.rate for c in calls]), eta_paths, h_tilde, scale, nodes, tolerance
    )
    return prices.reshape(n_eta, n_calls, h_next.size)


def eta_scenarios(pp: PhysicalParams, kp: KernelParams, eta_t: float, h_star_next: float, M: int,
                  sigma2: Optional[float] = None, nodes: int = MIXTURE_NODES) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Hermite scenarios of the AR(1) variance risk ratio path :math:`(\\eta_t, ..., \\eta_{t+M-1})`.

    Each scenario is the Gaussian conditional mean of the path given its average weighted by
    the expected risk-neutral variances :math:`E^Q_t[h^*_{t+k}]`, floored at :data:`ETA_FLOOR`.

    :param pp: Physical parameters
    :type pp: PhysicalParams
    :param kp: Kernel parameters
    :type kp: KernelParams
    :param eta_t: Current variance risk ratio
    :type eta_t: float
    :param h_star_next: Risk-neutral next-day variance
    :type h_star_next: float
    :param M: Maturity in trading days
    :type M: int
    :param sigma2: Innovation variance, default to ``kp.sigma ** 2``
    :type sigma2: Optional[float]
    :param nodes: Gauss-Hermite nodes, default to ``8``
    :type nodes: int

    :returns: Tuple[numpy.ndarray, numpy.ndarray] -- Paths of shape ``(nodes, M)`` and their weights;
        a single expected path when the path is deterministic
    """

    sigma2 = kp.sigma2 if sigma2 is None else sigma2
    M = ensure_maturity(M)
    path = pricing_path(kp, eta_t, M)
    days = np.arange(M)[:, None]
    entries = np.arange(1, M)[None, :]
    # response of eta_{t+j} to the innovation entering at t+i
    response = np.where(days >= entries, kp.theta ** np.maximum(days - entries, 0), 0.0)
    covariance = sigma2 * response @ response.T
    weights = expected_variance_path(pp, path, h_star_next, M)
    weights = weights / weights.sum()
    loading = covariance @ weights
    spread = float(weights @ loading)
    if not spread > 0:
        return path[None, :], np.ones(1)
    shocks, probabilities = gauss_hermite(nodes)
    paths = path[None, :] + shocks[:, None] * (loading / math.sqrt(spread))[None, :]
    return np.maximum(paths, ETA_FLOOR), np.asarray(probabilities)


def price_call_mixture(pp: PhysicalParams, kp: KernelParams, call: EuropeanCall, eta_t: float,
                       h_star_next: float, sigma2: Optional[float] = None, nodes: int = DEFAULT_NODES,
                       scenarios: int = MIXTURE_NODES, tolerance: Optional[float] = FOURIER_TOLERANCE) -> float:
    """
    Call price under AR(1) variance risk ratio dynamics as the probability-weighted average of
    predetermined prices over :func:`eta_scenarios`. Unlike the certainty-equivalent price it
    carries the dispersion of the integrated variance induced by the ratio path, not only its mean.
    """

    h_star_next = ensure_positive("h_star_next", h_star_next)
    M = call.maturity_days
    paths, probabilities = eta_scenarios(pp, kp, eta_t, h_star_next, M, sigma2, scenarios)
    n = probabilities.size
    prices = _fourier_prices(
        pp, np.full(n, call.spot), np.full(n, call.strike), np.full(n, M), np.full(n, call.rate), paths,
        np.full((n, 1), h_star_next), np.full(n, M * h_star_next), nodes, tolerance
    )
    return float(probabilities @ prices[:, 0])


def price_call_stochastic(pp: PhysicalParams, kp: KernelParams, call: EuropeanCall, eta_t: float,
                          h_star_next: float, sigma2: Optional[float] = None, nodes: int = DEFAULT_NODES,
                          method: Literal["certainty-equivalent", "mixture"] = "certainty-equivalent",
                          tolerance: Optional[float] = FOURIER_TOLERANCE) -> float:
    """
    Approximate call price under AR(1) variance risk ratio dynamics.

    ``certainty-equivalent`` prices along the expected path at :math:`h^* + \\psi`;
    ``mixture`` averages predetermined prices over Gauss-Hermite ratio paths.

    :param pp: Physical parameters
    :type pp: PhysicalParams
    :param kp: Kernel parameters
    :type kp: KernelParams
    :param call: Contract
    :type call: EuropeanCall
    :param eta_t: Current variance risk ratio
    :type eta_t: float
    :param h_star_next: Risk-neutral next-day variance
    :type h_star_next: float
    :param sigma2: Innovation variance, default to ``kp.sigma ** 2``
    :type sigma2: Optional[float]
    :param nodes: Gauss-Laguerre nodes, default to ``32``
    :type nodes: int
    :param method: ``certainty-equivalent`` or ``mixture``, default to ``certainty-equivalent``
    :type method: Literal["certainty-equivalent", "mixture"]
    :param tolerance: Relative change ending the node doubling, ``None`` for a fixed grid
    :type tolerance: Optional[float]

    :returns: float -- Price
    """

    h_star_next = ensure_positive("h_star_next", h_star_next)
    sigma2 = kp.sigma2 if sigma2 is None else sigma2
    if method == "mixture":
        return price_call_mixture(pp, kp, call, eta_t, h_star_next, sigma2, nodes=nodes, tolerance=tolerance)
    if method != "certainty-equivalent":
        raise ValueError(f"Invalid method (expected: 'certainty-equivalent' or 'mixture', got: {method!r})")
    compensated = certainty_equivalent(pp, kp, eta_t, h_star_next, call.maturity_days, sigma2)
    return price_call_predetermined(
        pp, call, pricing_path(kp, eta_t, call.maturity_days), compensated.h_tilde, nodes=nodes, tolerance=tolerance
    )


def return_density(pp: PhysicalParams, eta_path: Sequence[float], h_star_next: float, M: int,
                   grid: Sequence[float], nodes: int = 2 * DEFAULT_NODES) -> np.ndarray:
    """
    Risk-neutral density of the cumulative return :math:`\\sum_{k=1}^{M} R_{t+k}` on a grid,
    by Fourier inversion of the MGF.
    """

    M = ensure_maturity(M)
    grid = np.asarray(grid, dtype=float)
    x, weights = gauss_laguerre(nodes)
    width = FOURIER_WIDTH * math.sqrt(M * h_star_next)
    phi = x / width
    coeffs = mgf_coeffs(pp, eta_path, 1j * phi, M)
    g = coeffs.evaluate(h_star_next)
    integrand = (np.exp(-1j * np.outer(grid, phi)) * g[None, :]).real
    return integrand @ (weights / width) / np.pi


def bs_implied_vol(price: float, call: EuropeanCall) -> float:
    """
    Black-Scholes implied volatility (annualized) of a call price.
    """

    return black_scholes.implied_vol(price, call.spot, call.strike, call.tau, call.annual_rate)


def bs_vega(call: EuropeanCall, iv: float) -> float:
    return float(black_scholes.vega(call.spot, call.strike, call.tau, call.annual_rate, iv))


def bs_delta(call: EuropeanCall, iv: float) -> float:
    return float(black_scholes.call_delta(call.spot, call.strike, call.tau, call.annual_rate, iv))


def black_scholes_call(call: EuropeanCall, vol: float) -> float:
    return float(black_scholes.call_price(call.spot, call.strike, call.tau, call.annual_rate, vol))


def vega_weighted_price(price: ArrayLike, vega: ArrayLike) -> ArrayLike:
    weighted = 100.0 * np.asarray(price, dtype=float) / np.asarray(vega, dtype=float)
    return float(weighted) if weighted.ndim == 0 else weighted
