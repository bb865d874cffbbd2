#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from typing import Union

import numpy as np
from scipy.optimize import brentq
from scipy.stats import norm

from ..exceptions import PricingError

ArrayLike = Union[float, np.ndarray]

# Implied volatility search bracket (annualized)
IV_LOWER: float = 1e-6
IV_UPPER: float = 10.0


def _d1(spot: ArrayLike, strike: ArrayLike, tau: ArrayLike, rate: ArrayLike, vol: ArrayLike) -> ArrayLike:
    return (np.log(spot / strike) + (rate + 0.5 * vol ** 2) * tau) / (vol * np.sqrt(tau))


def call_price(spot: ArrayLike, strike: ArrayLike, tau: ArrayLike, rate: ArrayLike, vol: ArrayLike) -> ArrayLike:
    """
    Black-Scholes European call price.

    :param spot: Spot level
    :param strike: Strike
    :param tau: Time to maturity in years
    :param rate: Continuously compounded annual rate
    :param vol: Annualized volatility

    :returns: Call price
    """

    d1 = _d1(spot, strike, tau, rate, vol)
    d2 = d1 - vol * np.sqrt(tau)
    return spot * norm.cdf(d1) - strike * np.exp(-rate * tau) * norm.cdf(d2)


def put_price(spot: ArrayLike, strike: ArrayLike, tau: ArrayLike, rate: ArrayLike, vol: ArrayLike) -> ArrayLike:
    d1 = _d1(spot, strike, tau, rate, vol)
    d2 = d1 - vol * np.sqrt(tau)
    return strike * np.exp(-rate * tau) * norm.cdf(-d2) - spot * norm.cdf(-d1)


def call_delta(spot: ArrayLike, strike: ArrayLike, tau: ArrayLike, rate: ArrayLike, vol: ArrayLike) -> ArrayLike:
    return norm.cdf(_d1(spot, strike, tau, rate, vol))


def vega(spot: ArrayLike, strike: ArrayLike, tau: ArrayLike, rate: ArrayLike, vol: ArrayLike) -> ArrayLike:
    """
    Black-Scholes vega :math:`S\\sqrt{\\tau}\\varphi(d_1)`, per unit of annualized volatility.
    """

    return spot * np.sqrt(tau) * norm.pdf(_d1(spot, strike, tau, rate, vol))


def implied_vol(price: float, spot: float, strike: float, tau: float, rate: float, xtol: float = 1e-12) -> float:
    """
    Invert the Black-Scholes call formula.

    :param price: Call price
    :type price: float
    :param spot: Spot level
    :type spot: float
    :param strike: Strike
    :type strike: float
    :param tau: Time to maturity in years
    :type tau: float
    :param rate: Continuously compounded annual rate
    :type rate: float
    :param xtol: Absolute tolerance in volatility, default to ``1e-12``
    :type xtol: float

    :returns: float -- Annualized implied volatility
    """

    lower = max(0.0, spot - strike * np.exp(-rate * tau))
    if not (lower < price < spot):
        raise PricingError(
            f"Invalid call price for implied volatility (expected: {lower} < price < {spot}, got: {price})"
        )
    objective = lambda vol: call_price(spot, strike, tau, rate, vol) - price
    if objective(IV_LOWER) >= 0:
        return IV_LOWER
    # Brenner-Subrahmanyam start narrows the bracket when it is valid
    guess = np.sqrt(2.0 * np.pi / tau) * price / spot
    upper = IV_UPPER
    if IV_LOWER < guess < IV_UPPER and objective(guess) > 0:
        upper = guess
    elif objective(IV_UPPER) < 0:
        raise PricingError(f"Invalid call price for implied volatility (expected: below {IV_UPPER} vol, got: {price})")
    return float(brentq(objective, IV_LOWER, upper, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500))
