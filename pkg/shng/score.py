#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from dataclasses import (
    dataclass, field
)
from typing import (
    Literal, Optional, Sequence, Tuple, Union
)

import logging
import math

import numpy as np

from .exceptions import (
    ConsistencyError, DegenerateInformationError, DomainError, SensitivityError
)
from .libs.equicorrelation import (
    EquicorrAlgebra, duplication_matrix, vec, vech
)
from .libs.quadrature import (
    DEFAULT_NODES, gauss_hermite
)
from .model import (
    ETA_FLOOR, FilterState, KernelParams, PhysicalParams, to_physical_shock, variance_update
)
from .options import (
    EuropeanCall, panel_call_prices
)
from .utils import (
    VIX_ANNUALIZER, ensure_maturity
)
from .vix import (
    vix_price, vix_term_derivatives, vix_terms_closed
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Relative finite-difference step for option sensitivities
OPTION_STEP: float = 1e-3
# Relative finite-difference step and tolerance of the VIX sensitivity cross-check
VIX_CHECK_STEP: float = 1e-5
VIX_CHECK_TOLERANCE: float = 1e-6
# Perturbation offsets used by the Richardson-extrapolated central difference
RICHARDSON_OFFSETS: np.ndarray = np.array([0.0, 1.0, -1.0, 0.5, -0.5])


@dataclass(frozen=True)
class Instruments:
    """
    Derivative instruments observed on one day.

    :param vix_maturity: VIX maturity in trading days, ``None`` when no VIX is observed
    :param calls: Option contracts
    :param vegas: Black-Scholes vegas used to weight the option prices
    """

    vix_maturity: Optional[int] = None
    calls: Tuple[EuropeanCall, ...] = ()
    vegas: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        if self.vix_maturity is not None:
            ensure_maturity(self.vix_maturity)
        if len(self.calls) != np.size(self.vegas):
            raise ValueError(f"Invalid vegas (expected: {len(self.calls)} values, got: {np.size(self.vegas)})")
        if np.any(~(np.asarray(self.vegas) > 0)):
            raise DomainError(f"Invalid vegas (expected: > 0, got: {self.vegas})")

    @property
    def has_vix(self) -> bool:
        return self.vix_maturity is not None

    @property
    def n_options(self) -> int:
        return len(self.calls)

    @property
    def size(self) -> int:
        return int(self.has_vix) + self.n_options


@dataclass(frozen=True)
class ScoreContext:
    grads: np.ndarray
    fisher: float
    score: float
    gradient: float = 0.0
    fisher_physical: Optional[float] = None

    @property
    def standardized_score(self) -> Optional[float]:
        # score rescaled to unit variance under the physical measure
        if self.fisher_physical is None or not self.fisher_physical > 0:
            return None
        return self.gradient / math.sqrt(self.fisher_physical)


def dvix_deta(pp: PhysicalParams, kp: KernelParams, eta_t: ArrayLike, h_next: ArrayLike, M: int,
              sigma2: Optional[float] = None, check: bool = False) -> ArrayLike:
    """
    Sensitivity of the model VIX to the current variance risk ratio, holding the
    physical variance :math:`h_{t+1}` fixed (so :math:`\\partial h^*_{t+1}/\\partial\\eta_t = h_{t+1}`).

    :param pp: Physical parameters
    :type pp: PhysicalParams
    :param kp: Kernel parameters
    :type kp: KernelParams
    :param eta_t: Current variance risk ratio
    :param h_next: Physical next-day variance
    :param M: VIX maturity in trading days
    :type M: int
    :param sigma2: Innovation variance, default to ``kp.sigma ** 2``
    :type sigma2: Optional[float]
    :param check: Compare with central finite differences, default to ``False``
    :type check: bool

    :returns: :math:`\\partial VIX/\\partial\\eta_t` in VIX points
    """

    sigma2 = kp.sigma2 if sigma2 is None else sigma2
    eta_t, h_next = np.asarray(eta_t, dtype=float), np.asarray(h_next, dtype=float)
    terms = vix_terms_closed(pp, kp, eta_t, M)
    da1, da3 = vix_term_derivatives(pp, kp, eta_t, M)
    radicand = terms.radicand(eta_t * h_next, sigma2)
    if np.any(~(radicand > 0)):
        raise SensitivityError(f"Invalid VIX radicand (expected: > 0, got: {radicand})")
    slope = da1 + da3 * eta_t * h_next + terms.a3 * h_next
    value = VIX_ANNUALIZER * slope / (2.0 * M * np.sqrt(radicand / M))
    if check:
        step = VIX_CHECK_STEP * eta_t
        up = vix_price(pp, kp, eta_t + step, (eta_t + step) * h_next, M, sigma2).value
        down = vix_price(pp, kp, eta_t - step, (eta_t - step) * h_next, M, sigma2).value
        numeric = (np.asarray(up) - np.asarray(down)) / (2.0 * step)
        if np.any(np.abs(numeric - value) > VIX_CHECK_TOLERANCE * np.abs(value)):
            raise ConsistencyError(f"Invalid VIX sensitivity (expected: {numeric}, got: {value})")
    return float(value) if np.ndim(value) == 0 else value


def _richardson(prices: np.ndarray, step: float) -> np.ndarray:
    coarse = (prices[1] - prices[2]) / (2.0 * step)
    fine = (prices[3] - prices[4]) / step
    return (4.0 * fine - coarse) / 3.0


def _perturbed_etas(eta_t: float, step: Optional[float]) -> Tuple[np.ndarray, float]:
    step = OPTION_STEP * eta_t if step is None else step
    if not (0 < step < eta_t):
        raise SensitivityError(f"Invalid finite-difference step (expected: 0 < step < {eta_t}, got: {step})")
    return eta_t + step * RICHARDSON_OFFSETS, step


def doption_deta(pp: PhysicalParams, kp: KernelParams, call: EuropeanCall, eta_t: float, h_star_next: float,
                 sigma2: Optional[float] = None, vega: Optional[float] = None, step: Optional[float] = None,
                 nodes: int = DEFAULT_NODES) -> float:
    """
    Sensitivity of the certainty-equivalent call price to :math:`\\eta_t` by a
    Richardson-extrapolated central difference, holding :math:`h_{t+1} = h^*_{t+1}/\\eta_t` fixed.

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
    :param vega: Vega weight; when given the result is in vega-weighted (×100) units
    :type vega: Optional[float]
    :param step: Absolute step, default to ``1e-3 * eta_t``
    :type step: Optional[float]
    :param nodes: Gauss-Laguerre nodes, default to ``32``
    :type nodes: int

    :returns: float -- Sensitivity
    """

    etas, step = _perturbed_etas(eta_t, step)
    prices = panel_call_prices(pp, kp, [call], etas, [h_star_next / eta_t], sigma2, nodes=nodes,
                               tolerance=None)[:, 0, 0]
    value = float(_richardson(prices, step))
    if not math.isfinite(value):
        raise SensitivityError(f"Invalid option sensitivity (expected: finite, got: {value})")
    return value if vega is None else 100.0 * value / vega


def instrument_values(pp: PhysicalParams, kp: KernelParams, instruments: Instruments, eta_t: float,
                      h_next: Sequence[float], sigma2: Optional[float] = None, nodes: int = DEFAULT_NODES,
                      step: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Model values and their :math:`\\eta_t`-sensitivities for every instrument at each
    candidate physical next-day variance.

    :returns: Tuple[numpy.ndarray, numpy.ndarray] -- Arrays of shape ``(len(h_next), instruments.size)``;
        the VIX (when present) comes first, options follow in vega-weighted units
    """

    sigma2 = kp.sigma2 if sigma2 is None else sigma2
    h_next = np.atleast_1d(np.asarray(h_next, dtype=float))
    values, grads = [], []
    if instruments.has_vix:
        M = instruments.vix_maturity
        values.append(np.atleast_1d(vix_price(pp, kp, eta_t, eta_t * h_next, M, sigma2).value)[:, None])
        grads.append(np.atleast_1d(dvix_deta(pp, kp, eta_t, h_next, M, sigma2))[:, None])
    if instruments.n_options:
        etas, step = _perturbed_etas(eta_t, step)
        prices = panel_call_prices(pp, kp, instruments.calls, etas, h_next, sigma2, nodes=nodes,
                                   tolerance=None)
        weights = 100.0 / np.asarray(instruments.vegas, dtype=float)[:, None]
        values.append((weights * prices[0]).T)
        grads.append((weights * _richardson(prices, step)).T)
    if not values:
        empty = np.zeros((h_next.size, 0))
        return empty, empty
    return np.hstack(values), np.hstack(grads)


def score_gradient(errors: Sequence[float], grads: Sequence[float], kp: KernelParams,
                   vix_first: bool = False) -> float:
    """
    Derivative of the day's derivative-price log-likelihood with respect to :math:`\\eta_t`,
    :math:`\\nabla_t = e_t'\\Omega^{-1}\\partial X^m_t/\\partial\\eta_t / \\sigma_e^2`.

    :param errors: Pricing errors :math:`X - X^m`
    :type errors: Sequence[float]
    :param grads: Model-value sensitivities
    :type grads: Sequence[float]
    :param kp: Kernel parameters
    :type kp: KernelParams
    :param vix_first: Treat the first entry as an independent VIX block, default to ``False``
    :type vix_first: bool

    :returns: float -- :math:`\\nabla_t`
    """

    errors, grads = np.asarray(errors, dtype=float), np.asarray(grads, dtype=float)
    if errors.shape != grads.shape:
        raise ValueError(f"Invalid grads (expected: shape {errors.shape}, got: {grads.shape})")
    if errors.size == 0:
        return 0.0
    total = 0.0
    if vix_first:
        total, errors, grads = errors[0] * grads[0], errors[1:], grads[1:]
    if errors.size:
        total += float(errors @ EquicorrAlgebra(errors.size, kp.rho).solve(grads))
    return total / kp.sigma_e ** 2


def score_gradient_vech(errors: Sequence[float], grads: Sequence[float], kp: KernelParams) -> float:
    """
    :math:`\\nabla_t` through the duplication matrix,
    :math:`-\\mathrm{vec}(\\Omega^{-1})'D_n u / (2\\sigma_e^2)` with
    :math:`u = \\partial\\,\\mathrm{vech}(e e')/\\partial\\eta_t`.
    """

    errors, grads = np.asarray(errors, dtype=float), np.asarray(grads, dtype=float)
    n = errors.size
    if n == 0:
        return 0.0
    inverse = EquicorrAlgebra(n, kp.rho).inverse()
    u = vech(-(np.outer(grads, errors) + np.outer(errors, grads)))
    return float(-vec(inverse) @ duplication_matrix(n) @ u / (2.0 * kp.sigma_e ** 2))


def fisher_from_moments(moments: np.ndarray, kp: KernelParams,
                        method: Literal["projection", "vech"] = "projection") -> float:
    """
    Expected squared score of one equicorrelated block from the gradient moments
    :math:`f(i, j) = E[\\partial X_i\\,\\partial X_j]`.

    ``projection`` evaluates :math:`\\mathrm{tr}(\\Omega^{-1} f)/\\sigma_e^2`; ``vech`` expands
    :math:`E[u_{ij}u_{kl}] = \\sigma_e^2[\\Theta_{jl}f_{ik} + \\Theta_{jk}f_{il} + \\Theta_{il}f_{jk} + \\Theta_{ik}f_{jl}]`.
    """

    moments = np.atleast_2d(np.asarray(moments, dtype=float))
    n = moments.shape[0]
    algebra = EquicorrAlgebra(n, kp.rho)
    if method == "projection":
        return float(np.sum(algebra.inverse() * moments) / kp.sigma_e ** 2)
    if method != "vech":
        raise ValueError(f"Invalid method (expected: 'projection' or 'vech', got: {method!r})")
    theta = kp.sigma_e ** 2 * (algebra.projection * algebra.common_eigenvalue
                               + algebra.orthogonal_projection * algebra.orthogonal_eigenvalue)
    # vech order: column by column over the lower triangle
    cols, rows = np.triu_indices(n)
    i, j = rows[:, None], cols[:, None]
    k, l = rows[None, :], cols[None, :]
    covariance = (theta[j, l] * moments[i, k] + theta[j, k] * moments[i, l]
                  + theta[i, l] * moments[j, k] + theta[i, k] * moments[j, l])
    loading = duplication_matrix(n).T @ vec(algebra.inverse())
    return float(loading @ covariance @ loading / (4.0 * kp.sigma_e ** 4))


def _fisher_blocks(grads: np.ndarray, weights: np.ndarray, instruments: Instruments, kp: KernelParams) -> float:
    moments = np.einsum("q,qi,qj->ij", weights, grads, grads)
    total = 0.0
    start = 0
    if instruments.has_vix:
        total += moments[0, 0] / kp.sigma_e ** 2
        start = 1
    if instruments.n_options:
        total += fisher_from_moments(moments[start:, start:], kp)
    return total


def fisher_information(pp: PhysicalParams, kp: KernelParams, state: FilterState, eta_t: float,
                       instruments: Instruments, sigma2: Optional[float] = None, M_nodes: int = DEFAULT_NODES,
                       measure: Literal["Q", "P"] = "Q", nodes: int = DEFAULT_NODES,
                       step: Optional[float] = None) -> float:
    """
    Conditional expected squared score by Gauss-Hermite quadrature over today's return shock.

    :param pp: Physical parameters
    :type pp: PhysicalParams
    :param kp: Kernel parameters
    :type kp: KernelParams
    :param state: Previous day's state, carrying :math:`h_t` and :math:`\\eta_{t-1}`
    :type state: FilterState
    :param eta_t: Current variance risk ratio
    :type eta_t: float
    :param instruments: Today's instruments
    :type instruments: Instruments
    :param sigma2: Innovation variance, default to ``kp.sigma ** 2``
    :type sigma2: Optional[float]
    :param M_nodes: Gauss-Hermite nodes, default to ``32``
    :type M_nodes: int
    :param measure: ``Q`` (normalizing measure) or ``P``, default to ``Q``
    :type measure: Literal["Q", "P"]
    :param nodes: Gauss-Laguerre nodes for option prices, default to ``32``
    :type nodes: int
    :param step: Option finite-difference step
    :type step: Optional[float]

    :returns: float -- Fisher information
    """

    if instruments.size == 0:
        raise DegenerateInformationError("Invalid instruments (expected: at least one, got: 0)")
    shocks, weights = gauss_hermite(M_nodes)
    h_t = state.h_next
    if measure == "Q":
        shocks = to_physical_shock(pp, shocks, h_t, state.eta)
    elif measure != "P":
        raise ValueError(f"Invalid measure (expected: 'Q' or 'P', got: {measure!r})")
    h_next = variance_update(pp, h_t, shocks)
    _, grads = instrument_values(pp, kp, instruments, eta_t, h_next, sigma2, nodes=nodes, step=step)
    if not np.any(grads):
        raise DegenerateInformationError("Invalid gradients (expected: at least one non-zero, got: all zero)")
    fisher = _fisher_blocks(grads, weights, instruments, kp)
    if not fisher > 0:
        raise DegenerateInformationError(f"Invalid Fisher information (expected: > 0, got: {fisher})")
    return fisher


def eta_update(kp: KernelParams, prev_eta: ArrayLike, score: ArrayLike,
               floor: float = ETA_FLOOR) -> Tuple[ArrayLike, ArrayLike]:
    """
    AR(1) law of motion :math:`\\eta_{t+1} = (1-\\theta)\\zeta + \\theta\\eta_t + \\sigma s_t`, floored.

    :returns: Tuple -- Next ratio and clamp flag
    """

    eta_next = (1.0 - kp.theta) * kp.zeta + kp.theta * np.asarray(prev_eta) + kp.sigma * np.asarray(score)
    clamped = eta_next < floor
    eta_next = np.where(clamped, floor, eta_next)
    if np.ndim(eta_next) == 0:
        return float(eta_next), bool(clamped)
    return eta_next, clamped


def scaled_score_and_update(kp: KernelParams, prev_eta: float, grad: float, fisher: float,
                            floor: float = ETA_FLOOR) -> Tuple[float, float]:
    """
    Scaled score :math:`s_t = \\nabla_t/\\sqrt{\\mathcal{I}_t}` and the next variance risk ratio.

    :param kp: Kernel parameters
    :type kp: KernelParams
    :param prev_eta: :math:`\\eta_t`
    :type prev_eta: float
    :param grad: :math:`\\nabla_t`
    :type grad: float
    :param fisher: Fisher information
    :type fisher: float
    :param floor: Positivity floor, default to ``0.05``
    :type floor: float

    :returns: Tuple[float, float] -- :math:`(s_t, \\eta_{t+1})`
    """

    if not fisher > 0:
        raise DegenerateInformationError(f"Invalid Fisher information (expected: > 0, got: {fisher})")
    score = grad / math.sqrt(fisher)
    eta_next, clamped = eta_update(kp, prev_eta, score, floor)
    if clamped:
        logger.warning("Variance risk ratio %g clamped to floor %g", (1.0 - kp.theta) * kp.zeta
                       + kp.theta * prev_eta + kp.sigma * score, floor)
    return score, eta_next


def score_context(pp: PhysicalParams, kp: KernelParams, state: FilterState, eta_t: float,
                  instruments: Instruments, errors: Sequence[float], grads: Sequence[float],
                  sigma2: Optional[float] = None, nodes: int = DEFAULT_NODES, step: Optional[float] = None,
                  standardize: bool = False) -> ScoreContext:
    """
    Gradient, Fisher information and scaled score of one day.

    :param state: Previous day's state, carrying :math:`h_t` and :math:`\\eta_{t-1}`
    :type state: FilterState
    :param errors: Pricing errors, VIX first when observed
    :type errors: Sequence[float]
    :param grads: Model-value sensitivities aligned with ``errors``
    :type grads: Sequence[float]
    :param standardize: Also compute the physical-measure Fisher information, default to ``False``
    :type standardize: bool

    :returns: ScoreContext -- Score bookkeeping of the day
    """

    gradient = score_gradient(errors, grads, kp, vix_first=instruments.has_vix)
    fisher = fisher_information(pp, kp, state, eta_t, instruments, sigma2, nodes=nodes, step=step)
    fisher_physical = None
    if standardize:
        fisher_physical = fisher_information(pp, kp, state, eta_t, instruments, sigma2, measure="P",
                                             nodes=nodes, step=step)
    return ScoreContext(
        grads=np.asarray(grads, dtype=float), fisher=fisher, score=gradient / math.sqrt(fisher),
        gradient=gradient, fisher_physical=fisher_physical
    )
