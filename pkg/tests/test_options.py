#!/usr/bin/env python3

import math

import numpy as np
import pytest

from shng.exceptions import DomainError
from shng.libs.black_scholes import IV_LOWER
from shng.options import (
    EuropeanCall, mgf_coeffs, price_call_predetermined, price_put_predetermined, compensation_psi,
    certainty_equivalent, panel_call_prices, price_call_stochastic, price_call_mixture, eta_scenarios, return_density,
    bs_implied_vol, bs_vega, black_scholes_call, vega_weighted_price, pricing_path, expected_eta_path
)
from shng.vix import vix_terms_closed


def test_european_call():

    call = EuropeanCall(spot=1000.0, strike=950.0, maturity_days=63, rate=0.0001)
    assert call.tau == 0.25
    assert call.discount == pytest.approx(math.exp(-0.0063), rel=1e-15)
    assert call.intrinsic == pytest.approx(1000.0 - 950.0 * call.discount, rel=1e-15)

    with pytest.raises(DomainError, match="Invalid maturity"):
        EuropeanCall(spot=1000.0, strike=1000.0, maturity_days=127)
    with pytest.raises(ValueError, match="Invalid strike"):
        EuropeanCall(spot=1000.0, strike=0.0, maturity_days=21)


def test_martingale_identity(shng_opt):

    pp, kp = shng_opt
    pp = pp.replace(r=0.0001)
    h_star = kp.zeta * pp.unconditional_variance
    for M in (1, 21, 126):
        coeffs = mgf_coeffs(pp, pricing_path(kp, 1.3, M), 1.0, M)
        assert coeffs.evaluate(h_star).real == pytest.approx(math.exp(pp.r * M), rel=1e-10)
        # g*(0) is one for any path
        assert mgf_coeffs(pp, pricing_path(kp, 1.3, M), 0.0, M).evaluate(h_star).real == pytest.approx(1.0, rel=1e-14)


def test_black_scholes_nesting(shng_opt):

    pp, _kp = shng_opt
    variance = pp.unconditional_variance
    flat = pp.replace(omega=variance, alpha=0.0, beta=0.0)
    vol = math.sqrt(variance * 252)
    for ratio in (0.9, 0.95, 1.0, 1.05, 1.1):
        for M in (21, 42, 63, 105, 126):
            call = EuropeanCall(spot=1000.0, strike=1000.0 * ratio, maturity_days=M)
            price = price_call_predetermined(flat, call, np.ones(M), variance)
            assert price == pytest.approx(black_scholes_call(call, vol), rel=1e-8)


def test_call_prices(shng_opt):

    pp, kp = shng_opt
    h_star = 1.3 * pp.unconditional_variance
    path = pricing_path(kp, 1.3, 63)
    strikes = (900.0, 950.0, 1000.0, 1050.0, 1100.0)
    prices = [price_call_predetermined(pp, EuropeanCall(1000.0, strike, 63), path, h_star) for strike in strikes]
    assert all(a > b for a, b in zip(prices, prices[1:]))
    assert all(max(0.0, 1000.0 - strike) <= price <= 1000.0 for strike, price in zip(strikes, prices))

    call = EuropeanCall(1000.0, 1000.0, 63)
    put = price_put_predetermined(pp, call, path, h_star)
    assert put > 0
    assert prices[2] - put == pytest.approx(call.spot - call.strike * call.discount, abs=1e-9)
    # higher risk-neutral variance, higher price
    assert price_call_predetermined(pp, call, path, 2 * h_star) > prices[2]


def test_compensation_psi(shng_opt, hng_vix):

    pp, kp = shng_opt
    terms = vix_terms_closed(pp, kp, 1.3, 63)
    psi = compensation_psi(terms, kp.sigma2)
    assert psi > 0
    assert psi == pytest.approx(terms.a2 * kp.sigma2 / terms.a3, rel=1e-15)
    compensated = certainty_equivalent(pp, kp, 1.3, 1e-4, 63)
    assert compensated.h_tilde == pytest.approx(1e-4 + psi, rel=1e-15)
    with pytest.raises(ValueError, match="Invalid maturity"):
        compensation_psi(terms, kp.sigma2, M=21)

    pp, kp = hng_vix
    assert compensation_psi(vix_terms_closed(pp, kp, 1.3, 63), kp.sigma2) == 0.0


def test_price_call_stochastic(shng_opt):

    pp, kp = shng_opt
    h_next = pp.unconditional_variance
    calls = [EuropeanCall(1000.0, strike, M) for strike, M in ((1000.0, 21), (1020.0, 42), (980.0, 126))]
    etas = [0.73, 1.3]
    panel = panel_call_prices(pp, kp, calls, etas, [h_next, 2 * h_next])
    assert panel.shape == (2, 3, 2)

    for i, eta in enumerate(etas):
        for j, call in enumerate(calls):
            stochastic = price_call_stochastic(pp, kp, call, eta, eta * h_next)
            single = panel_call_prices(pp, kp, [call], [eta], [h_next])
            assert single[0, 0, 0] == pytest.approx(stochastic, rel=1e-9)
            assert panel[i, j, 0] == pytest.approx(stochastic, rel=1e-4)
            # the compensation raises the price above the expected-path price
            path_price = price_call_predetermined(pp, call, pricing_path(kp, eta, call.maturity_days), eta * h_next)
            assert stochastic > path_price


def test_quadrature_convergence(shng_opt):

    pp, kp = shng_opt
    h_star = kp.zeta * pp.unconditional_variance
    for M in (21, 42, 63, 105, 126):
        path = pricing_path(kp, kp.zeta, M)
        for ratio in (0.9, 0.95, 1.0, 1.05, 1.1):
            call = EuropeanCall(1000.0, 1000.0 * ratio, M)
            default = price_call_predetermined(pp, call, path, h_star, nodes=32)
            doubled = price_call_predetermined(pp, call, path, h_star, nodes=64)
            assert default == pytest.approx(doubled, rel=1e-6)
            fine = price_call_predetermined(pp, call, path, h_star, nodes=128, tolerance=None)
            assert default == pytest.approx(fine, rel=1e-6)

    # a fixed grid skips the refinement
    call = EuropeanCall(1000.0, 1100.0, 21)
    path = pricing_path(kp, kp.zeta, 21)
    fixed = price_call_predetermined(pp, call, path, h_star, nodes=32, tolerance=None)
    assert fixed == price_call_predetermined(pp, call, path, h_star, nodes=32, tolerance=None)
    assert fixed != price_call_predetermined(pp, call, path, h_star, nodes=32)


def test_eta_scenarios(shng_opt):

    pp, kp = shng_opt
    h_star = 0.73 * pp.unconditional_variance
    paths, weights = eta_scenarios(pp, kp, 0.73, h_star, 63)
    assert paths.shape == (8, 63) and weights.shape == (8,)
    assert weights.sum() == pytest.approx(1.0, rel=1e-12)
    assert np.all(paths >= 0.05)
    # today's ratio is known, dispersion grows along the path
    assert np.allclose(paths[:, 0], 0.73, rtol=1e-14)
    spread = np.sqrt(weights @ (paths - weights @ paths) ** 2)
    assert spread[-1] > spread[1] > 0

    paths, weights = eta_scenarios(pp, kp.replace(sigma=0.0), 0.73, h_star, 63)
    assert paths.shape == (1, 63) and weights.tolist() == [1.0]
    assert np.array_equal(paths[0], pricing_path(kp, 0.73, 63))
    assert eta_scenarios(pp, kp, 0.73, h_star, 1)[0].shape == (1, 1)


def test_price_call_mixture(shng_opt):

    pp, kp = shng_opt
    call = EuropeanCall(1000.0, 1000.0, 63)
    h_star = 0.73 * pp.unconditional_variance
    mixture = price_call_mixture(pp, kp, call, 0.73, h_star)
    assert mixture == price_call_stochastic(pp, kp, call, 0.73, h_star, method="mixture")
    compensated = price_call_stochastic(pp, kp, call, 0.73, h_star)
    # averaging over ratio paths keeps the concavity the compensation misses
    assert mixture < compensated
    assert mixture == pytest.approx(compensated, rel=0.02)

    flat = kp.replace(sigma=0.0)
    path_price = price_call_predetermined(pp, call, pricing_path(flat, 0.73, 63), h_star)
    assert price_call_mixture(pp, flat, call, 0.73, h_star) == pytest.approx(path_price, rel=1e-12)
    with pytest.raises(ValueError, match="Invalid method"):
        price_call_stochastic(pp, kp, call, 0.73, h_star, method="quadrature")


def test_expected_eta_path(shng_opt):

    _pp, kp = shng_opt
    path = expected_eta_path(kp, 1.5, 5)
    assert path[0] == pytest.approx(kp.zeta + kp.theta * (1.5 - kp.zeta), rel=1e-15)
    assert pricing_path(kp, 1.5, 5)[0] == 1.5
    assert np.array_equal(pricing_path(kp, 1.5, 5)[1:], path[:4])


def test_return_density(shng_opt):

    pp, kp = shng_opt
    M = 21
    h_star = 1.3 * pp.unconditional_variance
    spread = math.sqrt(M * h_star)
    grid = np.linspace(-10 * spread, 10 * spread, 4001)
    step = grid[1] - grid[0]
    density = return_density(pp, pricing_path(kp, 1.3, M), h_star, M, grid)
    assert np.sum(density) * step == pytest.approx(1.0, abs=1e-3)
    # risk-neutral martingale under the density
    assert np.sum(np.exp(grid) * density) * step == pytest.approx(1.0, abs=1e-3)
    # negative skew from the leverage
    mean = np.sum(grid * density) * step
    assert np.sum((grid - mean) ** 3 * density) < 0


def test_black_scholes_helpers():

    call = EuropeanCall(spot=1000.0, strike=1020.0, maturity_days=42)
    price = black_scholes_call(call, 0.18)
    assert bs_implied_vol(price, call) == pytest.approx(0.18, rel=1e-8)
    # prices below the smallest bracketed volatility pin to it
    assert bs_implied_vol(1e-5, EuropeanCall(spot=1000.0, strike=1000.0, maturity_days=21)) == IV_LOWER
    vega = bs_vega(call, 0.18)
    assert vega > 0
    assert vega_weighted_price(price, vega) == pytest.approx(100.0 * price / vega, rel=1e-15)
