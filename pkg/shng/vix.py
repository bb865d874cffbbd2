#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from dataclasses import dataclass
from functools import lru_cache
from typing import (
    Optional, Sequence, Tuple, Union
)

import logging

import numpy as np
import pandas as pd

from .exceptions import (
    ConsistencyError, DomainError, PricingError
)
from .model import (
    KernelParams, PhysicalParams, q_persistence
)
from .utils import (
    VIX_ANNUALIZER, ensure_maturity, geometric_series, power_sum
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Below this gap the divided difference is summed term by term
CONFLUENT_GAP: float = 1e-3
# Relative tolerance of the optional closed-form/brute-force cross-check
CROSS_CHECK_TOLERANCE: float = 1e-10


@dataclass(frozen=True)
class VixTerms:
    """
    Components of :math:`VIX^2 = A^2 (a_1 + a_2\\sigma^2 + a_3 h^*_{t+1}) / M`.
    """

    a1: ArrayLike
    a2: float
    a3: ArrayLike
    beta_tilde: float
    maturity: int = 1

    def radicand(self, h_star_next: ArrayLike, sigma2: float) -> ArrayLike:
        return self.a1 + self.a2 * sigma2 + self.a3 * h_star_next


@dataclass(frozen=True)
class VixQuote:
    value: ArrayLike
    maturity_days: int
    annualizer: float = VIX_ANNUALIZER


def _theta_check(kp: KernelParams) -> None:
    if not abs(kp.theta) < 1.0:
        raise DomainError(f"Invalid theta (expected: |theta| < 1, got: {kp.theta})")


def ar1_moments(kp: KernelParams, eta_t: ArrayLike, k: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """
    Conditional moments of the AR(1) variance risk ratio.

    :param kp: Kernel parameters
    :type kp: KernelParams
    :param eta_t: Current variance risk ratio
    :param k: Horizon(s), ``k >= 0``

    :returns: Tuple -- :math:`E_t[\\eta_{t+k}]` and :math:`E_t[(\\eta_{t+k} - \\zeta)^2]`
    """

    _theta_check(kp)
    k = np.asarray(k)
    if np.any(k < 0):
        raise DomainError(f"Invalid horizon (expected: >= 0, got: {k})")
    decay = kp.theta ** k
    gap = np.asarray(eta_t, dtype=float) - kp.zeta
    mean = kp.zeta + decay * gap
    second = decay ** 2 * gap ** 2 + kp.sigma ** 2 * (1.0 - decay ** 2) / (1.0 - kp.theta ** 2)
    if np.ndim(mean) == 0:
        return float(mean), float(second)
    return mean, second


def ar1_cross_moment(kp: KernelParams, eta_t: ArrayLike, a: ArrayLike, b: ArrayLike) -> ArrayLike:
    """
    :math:`E_t[\\eta_{t+a}\\eta_{t+b}]` for ``a >= b``.
    """

    mean_b, second_b = ar1_moments(kp, eta_t, b)
    raw_b = second_b + 2.0 * kp.zeta * mean_b - kp.zeta ** 2
    decay = kp.theta ** (np.asarray(a) - np.asarray(b))
    return decay * raw_b + kp.zeta * (1.0 - decay) * mean_b


@lru_cache(maxsize=4096)
def _divided_sum(x: float, u: float, v: float, n: int) -> float:
    """
    :math:`\\sum_{a=1}^{n} u^a (x^a - v^a)/(x - v)`, with the confluent limit
    :math:`\\sum_a a\\,u^a x^{a-1}` at ``x == v``.
    """

    if n <= 0:
        return 0.0
    if abs(x - v) > CONFLUENT_GAP:
        return (power_sum(u * x, n) - power_sum(u * v, n)) / (x - v)
    total, term, v_power, u_power = 0.0, 1.0, 1.0, u
    for _ in range(n):
        total += u_power * term
        v_power *= v
        term = x * term + v_power
        u_power *= u
    return total


def _beta_tilde(pp: PhysicalParams, beta_tilde: Optional[float]) -> float:
    return pp.beta_tilde if beta_tilde is None else float(beta_tilde)


def vix_terms_closed(pp: PhysicalParams, kp: KernelParams, eta_t: ArrayLike, M: int,
                     beta_tilde: Optional[float] = None, check: bool = False) -> VixTerms:
    """
    Closed-form VIX terms under AR(1) variance risk ratio dynamics.

    :param pp: Physical parameters
    :type pp: PhysicalParams
    :param kp: Kernel parameters
    :type kp: KernelParams
    :param eta_t: Current variance risk ratio (scalar or array)
    :param M: Maturity in trading days
    :type M: int
    :param beta_tilde: Override of :math:`\\tilde\\beta`, default to :math:`\\beta + \\alpha(\\gamma+\\lambda)^2`
    :type beta_tilde: Optional[float]
    :param check: Cross-check against :func:`vix_terms_bruteforce`, default to ``False``
    :type check: bool

    :returns: VixTerms -- :math:`(a_1, a_2, a_3, \\tilde\\beta)`
    """

    M = ensure_maturity(M)
    _theta_check(kp)
    eta_t = np.asarray(eta_t, dtype=float)
    if np.any(~(eta_t > 0)):
        raise DomainError(f"Invalid eta_t (expected: > 0, got: {eta_t})")
    bt, theta, zeta, n = _beta_tilde(pp, beta_tilde), kp.theta, kp.zeta, M - 1
    gap = eta_t - zeta

    d_11 = _divided_sum(bt, 1.0, 1.0, n)
    d_t1 = _divided_sum(bt, theta, 1.0, n)
    d_1t = _divided_sum(bt, 1.0, theta, n)
    d_tt = _divided_sum(bt, theta, theta, n)
    a1 = (pp.omega * (zeta * d_11 + gap * d_t1)
          + pp.alpha * (zeta ** 2 * d_11 + zeta * gap * (d_t1 + d_1t) + gap ** 2 * d_tt))
    a2 = pp.alpha * theta / (1.0 - theta ** 2) * (
        _divided_sum(bt * theta, 1.0, 1.0, n) - _divided_sum(bt * theta, 1.0, theta ** 2, n)
    )
    s_plain, s_mixed = geometric_series(bt, M), geometric_series(bt * theta, M)
    a3 = s_mixed + (s_plain - s_mixed) * zeta / eta_t

    terms = VixTerms(
        a1=float(a1) if a1.ndim == 0 else a1, a2=float(a2),
        a3=float(a3) if a3.ndim == 0 else a3, beta_tilde=bt, maturity=M
    )
    if check:
        for eta in np.atleast_1d(eta_t):
            oracle = vix_terms_bruteforce(pp, kp, float(eta), M, beta_tilde=beta_tilde)
            closed = vix_terms_closed(pp, kp, float(eta), M, beta_tilde=beta_tilde)
            for name in ("a1", "a2", "a3"):
                expected, got = getattr(oracle, name), getattr(closed, name)
                if abs(got - expected) > CROSS_CHECK_TOLERANCE * max(abs(expected), 1e-300):
                    raise ConsistencyError(
                        f"Invalid closed-form {name} (expected: {expected}, got: {got}, eta: {eta}, M: {M})"
                    )
    return terms


def vix_term_derivatives(pp: PhysicalParams, kp: KernelParams, eta_t: ArrayLike, M: int,
                         beta_tilde: Optional[float] = None) -> Tuple[ArrayLike, ArrayLike]:
    """
    Derivatives :math:`(\\partial a_1/\\partial\\eta_t, \\partial a_3/\\partial\\eta_t)`;
    :math:`a_2` does not depend on :math:`\\eta_t`.
    """

    M = ensure_maturity(M)
    eta_t = np.asarray(eta_t, dtype=float)
    bt, theta, zeta, n = _beta_tilde(pp, beta_tilde), kp.theta, kp.zeta, M - 1
    d_t1 = _divided_sum(bt, theta, 1.0, n)
    d_1t = _divided_sum(bt, 1.0, theta, n)
    d_tt = _divided_sum(bt, theta, theta, n)
    da1 = pp.omega * d_t1 + pp.alpha * (zeta * (d_t1 + d_1t) + 2.0 * (eta_t - zeta) * d_tt)
    da3 = -(geometric_series(bt, M) - geometric_series(bt * theta, M)) * zeta / eta_t ** 2
    return da1, da3


def vix_terms_bruteforce(pp: PhysicalParams, kp: KernelParams, eta_t: float, M: int,
                         beta_tilde: Optional[float] = None) -> VixTerms:
    """
    Direct double-sum evaluation of the VIX terms from the AR(1) moments.

    :param pp: Physical parameters
    :type pp: PhysicalParams
    :param kp: Kernel parameters
    :type kp: KernelParams
    :param eta_t: Current variance risk ratio
    :type eta_t: float
    :param M: Maturity in trading days
    :type M: int
    :param beta_tilde: Override of :math:`\\tilde\\beta`
    :type beta_tilde: Optional[float]

    :returns: VixTerms -- Terms computed in :math:`O(M^2)`
    """

    M = ensure_maturity(M)
    bt = _beta_tilde(pp, beta_tilde)
    deterministic, unit = kp.replace(sigma=0.0), kp.replace(sigma=1.0)

    k = np.arange(1, M + 1)
    mean_k, _ = ar1_moments(kp, eta_t, k - 1)
    a3 = float(np.sum(bt ** (k - 1) * np.asarray(mean_k) / eta_t))

    if M == 1:
        return VixTerms(a1=0.0, a2=0.0, a3=a3, beta_tilde=bt, maturity=M)
    # pairs (k, i) with 2 <= i <= k <= M
    k_idx, i_idx = np.tril_indices(M - 1)
    k_idx, i_idx = k_idx + 2, i_idx + 2
    lead, lag = k_idx - 1, i_idx - 2
    weight = bt ** (k_idx - i_idx)
    mean_lead, _ = ar1_moments(deterministic, eta_t, lead)
    cross = ar1_cross_moment(deterministic, eta_t, lead, lag)
    _, second_unit = ar1_moments(unit, eta_t, lag)
    _, second_zero = ar1_moments(deterministic, eta_t, lag)
    sigma_loading = kp.theta ** (lead - lag) * (np.asarray(second_unit) - np.asarray(second_zero))
    a1 = float(np.sum(weight * (pp.omega * np.asarray(mean_lead) + pp.alpha * cross)))
    a2 = float(np.sum(weight * pp.alpha * sigma_loading))
    return VixTerms(a1=a1, a2=a2, a3=a3, beta_tilde=bt, maturity=M)


def _vix_value(terms: VixTerms, h_star_next: ArrayLike, sigma2: float, M: int) -> ArrayLike:
    radicand = terms.radicand(h_star_next, sigma2)
    if np.any(radicand < 0):
        raise PricingError(f"Invalid VIX radicand (expected: >= 0, got: {radicand})")
    value = VIX_ANNUALIZER * np.sqrt(radicand / M)
    return float(value) if np.ndim(value) == 0 else value


def vix_price(pp: PhysicalParams, kp: KernelParams, eta_t: ArrayLike, h_star_next: ArrayLike, M: int,
              sigma2: Optional[float] = None) -> VixQuote:
    """
    Model VIX, :math:`A\\sqrt{(a_1 + a_2\\sigma^2 + a_3 h^*_{t+1})/M}`.

    :param pp: Physical parameters
    :type pp: PhysicalParams
    :param kp: Kernel parameters
    :type kp: KernelParams
    :param eta_t: Current variance risk ratio
    :param h_star_next: Risk-neutral next-day variance
    :param M: Maturity in trading days
    :type M: int
    :param sigma2: Innovation variance, default to ``kp.sigma ** 2``
    :type sigma2: Optional[float]

    :returns: VixQuote -- Annualized volatility points
    """

    sigma2 = kp.sigma2 if sigma2 is None else sigma2
    terms = vix_terms_closed(pp, kp, eta_t, M)
    return VixQuote(value=_vix_value(terms, h_star_next, sigma2, terms.maturity), maturity_days=terms.maturity)


def delta_bound(pp: PhysicalParams, kp: KernelParams, eta_low: float, eta_high: float, h_star_next: float,
                M: int, sigma2: Optional[float] = None, eta_t: Optional[float] = None) -> Tuple[float, float]:
    """
    VIX evaluated at the extreme persistences implied by a bounded variance risk ratio.

    :returns: Tuple[float, float] -- Lower and upper VIX
    """

    if not (0 < eta_low <= eta_high):
        raise DomainError(f"Invalid eta bounds (expected: 0 < eta_low <= eta_high, got: {eta_low}, {eta_high})")
    sigma2 = kp.sigma2 if sigma2 is None else sigma2
    eta_t = kp.zeta if eta_t is None else eta_t
    bounds = []
    for eta in (eta_low, eta_high):
        bt = pp.beta + pp.alpha * (pp.gamma + pp.lam + 0.5 * (eta - 1.0)) ** 2
        terms = vix_terms_closed(pp, kp, eta_t, M, beta_tilde=bt)
        bounds.append(_vix_value(terms, h_star_next, sigma2, terms.maturity))
    return min(bounds), max(bounds)


def expected_variance_path(pp: PhysicalParams, eta_path: Sequence[float], h_star_next: float, M: int) -> np.ndarray:
    """
    Exact :math:`E^Q_t[h^*_{t+k}]`, ``k = 1..M``, along a predetermined path
    :math:`(\\eta_t, \\eta_{t+1}, ..., \\eta_{t+M-1})`.
    """

    M = ensure_maturity(M)
    eta_path = np.asarray(eta_path, dtype=float)
    if eta_path.size < M:
        raise ValueError(f"Invalid eta path length (expected: >= {M}, got: {eta_path.size})")
    expected = np.empty(M)
    expected[0] = h_star_next
    for k in range(1, M):
        eta_k, eta_prev = eta_path[k], eta_path[k - 1]
        level = pp.omega * eta_k + pp.alpha * eta_k * eta_prev
        expected[k] = level + q_persistence(pp, eta_k, eta_prev) * expected[k - 1]
    return expected


def vix_decomposition(pp: PhysicalParams, kp: KernelParams,
                      maturities: Sequence[int] = (21, 42, 63, 84, 105, 126),
                      eta_t: Optional[ArrayLike] = None, h_star_next: Optional[ArrayLike] = None,
                      sigma2: Optional[float] = None) -> pd.DataFrame:
    """
    Shares of :math:`a_1`, :math:`a_2\\sigma^2` and :math:`a_3h^*` in the VIX radicand and
    the certainty-equivalent adjustment :math:`\\psi/h^*`, one row per maturity.

    The state defaults to :math:`\\eta_t = \\zeta` and :math:`h^* = \\zeta\\bar h`. Arrays of
    states, such as a filtered sample, give the average of each ratio over the states.
    """

    eta_t = np.atleast_1d(np.asarray(kp.zeta if eta_t is None else eta_t, dtype=float))
    if h_star_next is None:
        h_star_next = eta_t * pp.unconditional_variance
    h_star_next = np.broadcast_to(np.asarray(h_star_next, dtype=float), eta_t.shape)
    sigma2 = kp.sigma2 if sigma2 is None else sigma2
    rows = []
    for M in maturities:
        terms = vix_terms_closed(pp, kp, eta_t, M)
        radicand = terms.radicand(h_star_next, sigma2)
        rows.append({
            "maturity": int(M),
            "a1_share": float(np.mean(terms.a1 / radicand)),
            "a2_share": float(np.mean(terms.a2 * sigma2 / radicand)),
            "a3_share": float(np.mean(terms.a3 * h_star_next / radicand)),
            "psi_ratio": float(np.mean(terms.a2 * sigma2 / terms.a3 / h_star_next)),
            "vix": float(np.mean(_vix_value(terms, h_star_next, sigma2, terms.maturity))),
        })
    return pd.DataFrame(rows)
