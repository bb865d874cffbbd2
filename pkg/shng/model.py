#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from dataclasses import (
    dataclass, field
)
from typing import (
    Optional, Sequence, Tuple, Union
)

import logging
import math

import numpy as np

from .exceptions import (
    DomainError, FilteringError
)
from .utils import (
    ensure_finite, ensure_positive
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Floor for the conditional variance (daily units)
VARIANCE_FLOOR: float = 1e-12
# Positivity floor of the variance risk ratio
ETA_FLOOR: float = 0.05


@dataclass(frozen=True)
class PhysicalParams:
    """
    Heston-Nandi GARCH parameters under the physical measure.

    :param omega: Variance intercept (daily variance)
    :param beta: Variance persistence
    :param alpha: ARCH scale (daily variance)
    :param gamma: Leverage
    :param lam: Equity risk premium per unit variance
    :param r: Daily risk-free rate
    """

    omega: float
    beta: float
    alpha: float
    gamma: float
    lam: float
    r: float = 0.0

    def __post_init__(self) -> None:
        for name in ("omega", "beta", "alpha", "gamma", "lam", "r"):
            ensure_finite(name, getattr(self, name))
        if self.omega < 0:
            raise DomainError(f"Invalid omega (expected: >= 0, got: {self.omega})")
        if self.beta < 0:
            raise DomainError(f"Invalid beta (expected: >= 0, got: {self.beta})")
        if self.alpha < 0:
            raise DomainError(f"Invalid alpha (expected: >= 0, got: {self.alpha})")

    @property
    def persistence(self) -> float:
        return self.beta + self.alpha * self.gamma ** 2

    @property
    def beta_tilde(self) -> float:
        return self.beta + self.alpha * (self.gamma + self.lam) ** 2

    @property
    def is_stationary(self) -> bool:
        return self.persistence < 1.0

    @property
    def unconditional_variance(self) -> float:
        if not self.is_stationary:
            raise DomainError(
                f"Invalid physical persistence (expected: beta + alpha*gamma^2 < 1, got: {self.persistence})"
            )
        return (self.omega + self.alpha) / (1.0 - self.persistence)

    def replace(self, **changes) -> "PhysicalParams":
        values = {name: getattr(self, name) for name in ("omega", "beta", "alpha", "gamma", "lam", "r")}
        values.update(changes)
        return PhysicalParams(**values)


@dataclass(frozen=True)
class KernelParams:
    """
    Dynamics of the variance risk ratio and the pricing-error distribution.

    :param theta: AR(1) persistence of eta
    :param zeta: Unconditional mean of eta
    :param sigma: Score-innovation scale
    :param sigma_e: Pricing-error standard deviation (implied-volatility points)
    :param rho: Common pricing-error correlation
    """

    theta: float
    zeta: float
    sigma: float
    sigma_e: float = 1.0
    rho: float = 0.0

    def __post_init__(self) -> None:
        for name in ("theta", "zeta", "sigma", "sigma_e", "rho"):
            ensure_finite(name, getattr(self, name))
        if not abs(self.theta) < 1.0:
            raise DomainError(f"Invalid theta (expected: |theta| < 1, got: {self.theta})")
        if self.zeta <= 0:
            raise DomainError(f"Invalid zeta (expected: > 0, got: {self.zeta})")
        if self.sigma < 0:
            raise DomainError(f"Invalid sigma (expected: >= 0, got: {self.sigma})")
        if self.sigma_e <= 0:
            raise DomainError(f"Invalid sigma_e (expected: > 0, got: {self.sigma_e})")
        if not (-1.0 < self.rho < 1.0):
            raise DomainError(f"Invalid rho (expected: -1 < rho < 1, got: {self.rho})")

    @property
    def sigma2(self) -> float:
        return self.sigma ** 2

    @property
    def stationary_variance(self) -> float:
        return self.sigma ** 2 / (1.0 - self.theta ** 2)

    def replace(self, **changes) -> "KernelParams":
        values = {name: getattr(self, name) for name in ("theta", "zeta", "sigma", "sigma_e", "rho")}
        values.update(changes)
        return KernelParams(**values)


@dataclass(frozen=True)
class FilterState:
    """
    One filtered day: physical and risk-neutral next-day variance, variance risk
    ratio, scaled score and standardized shock.
    """

    h_next: float
    eta: float
    h_star_next: float
    score: float = 0.0
    z: float = 0.0

    def __post_init__(self) -> None:
        if not self.h_next > 0:
            raise DomainError(f"Invalid h_next (expected: > 0, got: {self.h_next})")
        if not self.eta > 0:
            raise DomainError(f"Invalid eta (expected: > 0, got: {self.eta})")

    @classmethod
    def from_variance(cls, h_next: float, eta: float, score: float = 0.0, z: float = 0.0) -> "FilterState":
        return cls(h_next=h_next, eta=eta, h_star_next=eta * h_next, score=score, z=z)


@dataclass(frozen=True)
class QDayParams:
    omega_star: float
    beta_star: float
    alpha_star: float
    gamma_star: float


@dataclass(frozen=True)
class KernelCoeffs:
    xi: float
    phi: float


@dataclass(frozen=True)
class VariancePath:
    """
    Output of :func:`filter_physical_variance`.

    ``h`` holds :math:`h_1, ..., h_{T+1}`, ``z`` the shocks :math:`z_1, ..., z_T` and
    ``clamped`` flags the days whose next variance hit :data:`VARIANCE_FLOOR`.
    """

    h: np.ndarray
    z: np.ndarray
    clamped: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    @property
    def h_next(self) -> float:
        return float(self.h[-1])


def _check_eta(name: str, eta: ArrayLike) -> None:
    if np.any(~(np.asarray(eta) > 0)):
        raise DomainError(f"Invalid {name} (expected: > 0, got: {eta})")


def variance_update(params: PhysicalParams, h: ArrayLike, z: ArrayLike) -> ArrayLike:
    return params.omega + params.beta * h + params.alpha * (z - params.gamma * np.sqrt(h)) ** 2


def standardized_shock(params: PhysicalParams, ret: ArrayLike, h: ArrayLike) -> ArrayLike:
    return (ret - params.r - (params.lam - 0.5) * h) / np.sqrt(h)


def filter_physical_variance(params: PhysicalParams, returns: Sequence[float],
                             h_init: Optional[float] = None) -> VariancePath:
    """
    Run the physical Heston-Nandi GARCH variance recursion over a return series.

    :param params: Physical parameters
    :type params: PhysicalParams
    :param returns: Daily log-returns :math:`R_1, ..., R_T`
    :type returns: Sequence[float]
    :param h_init: Variance :math:`h_1`, default to the unconditional variance
    :type h_init: Optional[float]

    :returns: VariancePath -- Variances :math:`h_1..h_{T+1}` and shocks :math:`z_1..z_T`

    >>> from shng.model import PhysicalParams, filter_physical_variance
    >>> path = filter_physical_variance(PhysicalParams(0.0, 0.5, 5e-6, 280.0, 2.2), [0.001, -0.02])
    >>> path.h.shape, path.z.shape
    ((3,), (2,))
    """

    if h_init is None:
        h_init = params.unconditional_variance
    h_init = ensure_positive("h_init", h_init)
    returns = np.asarray(returns, dtype=float)
    h = np.empty(returns.size + 1)
    z = np.empty(returns.size)
    clamped = np.zeros(returns.size, dtype=bool)
    h[0] = h_init
    for day, ret in enumerate(returns):
        if not math.isfinite(ret):
            raise FilteringError(f"Invalid return (expected: finite, got: {ret})", day=day)
        z[day] = standardized_shock(params, ret, h[day])
        h_next = float(variance_update(params, h[day], z[day]))
        if not h_next > 0:
            raise FilteringError(f"Invalid conditional variance (expected: > 0, got: {h_next})", day=day)
        if h_next < VARIANCE_FLOOR:
            logger.warning("Conditional variance %g clamped to %g on day %d", h_next, VARIANCE_FLOOR, day)
            h_next, clamped[day] = VARIANCE_FLOOR, True
        h[day + 1] = h_next
    return VariancePath(h=h, z=z, clamped=clamped)


def q_day_params(params: PhysicalParams, eta_t: ArrayLike, eta_prev: ArrayLike) -> QDayParams:
    """
    Risk-neutral GARCH coefficients of one day.

    :param params: Physical parameters
    :type params: PhysicalParams
    :param eta_t: Variance risk ratio :math:`\\eta_t`
    :param eta_prev: Variance risk ratio :math:`\\eta_{t-1}`

    :returns: QDayParams -- :math:`(\\omega^*_t, \\beta^*_t, \\alpha^*_t, \\gamma^*_t)`
    """

    _check_eta("eta_t", eta_t)
    _check_eta("eta_prev", eta_prev)
    return QDayParams(
        omega_star=params.omega * eta_t,
        beta_star=params.beta * eta_t / eta_prev,
        alpha_star=params.alpha * eta_t * eta_prev,
        gamma_star=(params.gamma + params.lam - 0.5) / eta_t + 0.5
    )


def q_persistence(params: PhysicalParams, eta_t: float, eta_prev: float) -> float:
    """
    Exact risk-neutral persistence :math:`\\beta^*_t + \\alpha^*_t\\gamma^{*2}_{t-1}`, the
    coefficient of :math:`h^*_t` in :math:`E^Q_{t-1}[h^*_{t+1}]`.
    """

    q_today = q_day_params(params, eta_t, eta_prev)
    gamma_prev = (params.gamma + params.lam - 0.5) / eta_prev + 0.5
    return q_today.beta_star + q_today.alpha_star * gamma_prev ** 2


def kernel_coeffs(params: PhysicalParams, eta_t: float) -> KernelCoeffs:
    _check_eta("eta_t", eta_t)
    if not params.alpha > 0:
        raise DomainError(f"Invalid alpha (expected: > 0 for the pricing kernel, got: {params.alpha})")
    return KernelCoeffs(
        xi=(eta_t - 1.0) / (2.0 * params.alpha * eta_t),
        phi=(eta_t - 1.0) * (params.gamma - 0.5) / eta_t - params.lam / eta_t
    )


def eta_from_xi(params: PhysicalParams, xi: float) -> float:
    denominator = 1.0 - 2.0 * params.alpha * xi
    if not denominator > 0:
        raise DomainError(f"Invalid xi (expected: < 1/(2*alpha), got: {xi})")
    return 1.0 / denominator


def kernel_intercepts(params: PhysicalParams, xi: float, phi: float, delta: float, pi: float) -> Tuple[float, float]:
    """
    Intercept terms :math:`(\\kappa_0, \\kappa_1)` of the log pricing kernel.

    :returns: Tuple[float, float] -- :math:`\\kappa_0 = \\delta + \\xi\\omega + \\phi r`,
        :math:`\\kappa_1 = \\pi + \\xi(\\beta - 1 + \\alpha(\\lambda - 1/2 + \\gamma)^2)`
    """

    kappa0 = delta + xi * params.omega + phi * params.r
    kappa1 = pi + xi * (params.beta - 1.0 + params.alpha * (params.lam - 0.5 + params.gamma) ** 2)
    return kappa0, kappa1


def log_kernel_quadratic(params: PhysicalParams, xi: float, h_t: float, excess_return: ArrayLike,
                         kappa0: float = 0.0, kappa1: float = 0.0) -> ArrayLike:
    """
    Log pricing kernel as a quadratic function of the excess return
    :math:`-\\lambda(R-r) + \\xi\\alpha(R-r)^2/h_t + \\kappa_0 + \\kappa_1 h_t`.

    :param params: Physical parameters
    :type params: PhysicalParams
    :param xi: Variance risk aversion
    :type xi: float
    :param h_t: Conditional variance
    :type h_t: float
    :param excess_return: :math:`R_t - r`
    :param kappa0: Intercept, default to ``0``
    :type kappa0: float
    :param kappa1: Variance loading of the intercept, default to ``0``
    :type kappa1: float

    :returns: Log kernel contribution
    """

    h_t = ensure_positive("h_t", h_t)
    excess_return = np.asarray(excess_return, dtype=float)
    value = -params.lam * excess_return + xi * params.alpha * excess_return ** 2 / h_t + kappa0 + kappa1 * h_t
    return float(value) if value.ndim == 0 else value


def news_impact_curve(params: PhysicalParams, eta_t: float, eta_prev: float, h_star_t: float,
                      z_star: ArrayLike) -> ArrayLike:
    h_star_t = ensure_positive("h_star_t", h_star_t)
    z_star = np.asarray(z_star, dtype=float)
    value = (params.alpha * eta_t * eta_prev * z_star ** 2
             - 2.0 * params.alpha * params.gamma * eta_t * math.sqrt(h_star_t) * z_star)
    return float(value) if value.ndim == 0 else value


def to_risk_neutral_shock(params: PhysicalParams, z: ArrayLike, h: ArrayLike, eta: ArrayLike) -> ArrayLike:
    """
    Measure change of the return shock, :math:`z^* = (z + (\\lambda + \\eta/2 - 1/2)\\sqrt{h})/\\sqrt{\\eta}`.
    """

    return (z + (params.lam + 0.5 * eta - 0.5) * np.sqrt(h)) / np.sqrt(eta)


def to_physical_shock(params: PhysicalParams, z_star: ArrayLike, h: ArrayLike, eta: ArrayLike) -> ArrayLike:
    return np.sqrt(eta) * z_star - (params.lam + 0.5 * eta - 0.5) * np.sqrt(h)


def physical_persistence(params: PhysicalParams) -> float:
    return params.persistence


def beta_tilde(params: PhysicalParams) -> float:
    """
    Approximate risk-neutral persistence :math:`\\beta + \\alpha(\\gamma + \\lambda)^2`, dropping
    the :math:`(\\eta - 1)/2` term of the exact expression.
    """

    return params.beta_tilde


def unconditional_variance(params: PhysicalParams) -> float:
    return params.unconditional_variance
