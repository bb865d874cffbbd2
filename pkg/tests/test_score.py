#!/usr/bin/env python3

import numpy as np
import pytest

from shng.exceptions import DegenerateInformationError, SensitivityError
from shng.model import FilterState, to_physical_shock, variance_update
from shng.options import EuropeanCall
from shng.score import (
    ETA_FLOOR, Instruments, dvix_deta, doption_deta, instrument_values, score_gradient, score_gradient_vech,
    fisher_from_moments, fisher_information, eta_update, scaled_score_and_update, score_context
)
from shng.vix import vix_price


def _instruments(with_vix: bool = True) -> Instruments:
    calls = (EuropeanCall(1000.0, 1000.0, 21), EuropeanCall(1000.0, 1020.0, 42), EuropeanCall(1000.0, 1000.0, 63))
    return Instruments(vix_maturity=21 if with_vix else None, calls=calls, vegas=np.array([110.0, 150.0, 190.0]))


def test_instruments():

    instruments = _instruments()
    assert instruments.has_vix and instruments.n_options == 3 and instruments.size == 4
    assert Instruments(vix_maturity=21).size == 1
    with pytest.raises(ValueError, match="Invalid vegas"):
        Instruments(calls=(EuropeanCall(1000.0, 1000.0, 21),), vegas=np.array([1.0, 2.0]))


def test_dvix_deta(shng_opt, hng_vix):

    for pp, kp in (shng_opt, hng_vix):
        h_next = pp.unconditional_variance
        for M in (21, 63):
            # the built-in finite-difference check raises on mismatch
            value = dvix_deta(pp, kp, 1.3, h_next, M, check=True)
            step = 1e-6
            up = vix_price(pp, kp, 1.3 + step, (1.3 + step) * h_next, M).value
            down = vix_price(pp, kp, 1.3 - step, (1.3 - step) * h_next, M).value
            assert value == pytest.approx((up - down) / (2 * step), rel=1e-6)
            assert value > 0


def test_doption_deta(shng_opt):

    pp, kp = shng_opt
    call = EuropeanCall(1000.0, 1000.0, 63)
    h_star = 1.3 * pp.unconditional_variance
    coarse = doption_deta(pp, kp, call, 1.3, h_star)
    fine = doption_deta(pp, kp, call, 1.3, h_star, step=0.5e-3 * 1.3)
    assert coarse > 0
    assert fine == pytest.approx(coarse, rel=1e-6)
    assert doption_deta(pp, kp, call, 1.3, h_star, vega=150.0) == pytest.approx(100.0 * coarse / 150.0, rel=1e-12)
    with pytest.raises(SensitivityError, match="Invalid finite-difference step"):
        doption_deta(pp, kp, call, 1.3, h_star, step=2.0)


def test_instrument_values(shng_opt):

    pp, kp = shng_opt
    h_next = pp.unconditional_variance * np.array([0.5, 1.0, 2.0])
    values, grads = instrument_values(pp, kp, _instruments(), 1.3, h_next)
    assert values.shape == grads.shape == (3, 4)
    assert values[1, 0] == pytest.approx(vix_price(pp, kp, 1.3, 1.3 * h_next[1], 21).value, rel=1e-14)
    assert np.all(grads > 0)
    assert np.all(np.diff(values, axis=0) > 0)

    values, grads = instrument_values(pp, kp, Instruments(), 1.3, h_next)
    assert values.shape == (3, 0)


def test_score_gradient(shng_opt):

    _pp, kp = shng_opt
    generator = np.random.default_rng(7)
    for n in (1, 2, 5, 12):
        errors, grads = generator.normal(size=n), generator.normal(size=n)
        omega = (1 - kp.rho) * np.eye(n) + kp.rho * np.ones((n, n))
        dense = errors @ np.linalg.solve(omega, grads) / kp.sigma_e ** 2
        assert score_gradient(errors, grads, kp) == pytest.approx(dense, rel=1e-10)
        assert score_gradient_vech(errors, grads, kp) == pytest.approx(dense, rel=1e-10)

    errors, grads = np.array([0.4, 1.0, -2.0]), np.array([2.0, 0.5, 0.5])
    split = 0.4 * 2.0 / kp.sigma_e ** 2 + score_gradient(errors[1:], grads[1:], kp)
    assert score_gradient(errors, grads, kp, vix_first=True) == pytest.approx(split, rel=1e-14)
    assert score_gradient([], [], kp) == 0.0
    with pytest.raises(ValueError, match="Invalid grads"):
        score_gradient([1.0, 2.0], [1.0], kp)


def test_fisher_from_moments(shng_opt):

    _pp, kp = shng_opt
    generator = np.random.default_rng(11)
    for n in (1, 3, 6):
        draws = generator.normal(size=(50, n))
        moments = draws.T @ draws / 50
        projection = fisher_from_moments(moments, kp, method="projection")
        assert projection > 0
        assert fisher_from_moments(moments, kp, method="vech") == pytest.approx(projection, rel=1e-10)
    with pytest.raises(ValueError, match="Invalid method"):
        fisher_from_moments(np.eye(2), kp, method="dense")


def test_fisher_information(shng_opt):

    pp, kp = shng_opt
    state = FilterState.from_variance(h_next=pp.unconditional_variance, eta=kp.zeta)
    vix_only = Instruments(vix_maturity=21)
    fisher_q = fisher_information(pp, kp, state, 1.3, vix_only)
    fisher_p = fisher_information(pp, kp, state, 1.3, vix_only, measure="P")
    assert fisher_q > 0 and fisher_p > 0
    assert fisher_q != pytest.approx(fisher_p, rel=1e-6)
    # adding options adds information
    assert fisher_information(pp, kp, state, 1.3, _instruments(), M_nodes=16) > fisher_q

    with pytest.raises(DegenerateInformationError, match="at least one"):
        fisher_information(pp, kp, state, 1.3, Instruments())
    with pytest.raises(ValueError, match="Invalid measure"):
        fisher_information(pp, kp, state, 1.3, vix_only, measure="R")


def test_fisher_information_monte_carlo(shng_opt):

    pp, kp = shng_opt
    state = FilterState.from_variance(h_next=pp.unconditional_variance, eta=kp.zeta)
    quadrature = fisher_information(pp, kp, state, 1.3, Instruments(vix_maturity=21))

    rng = np.random.Generator(np.random.Philox(13))
    shocks = to_physical_shock(pp, rng.standard_normal(200_000), state.h_next, state.eta)
    h_next = variance_update(pp, state.h_next, shocks)
    squared = dvix_deta(pp, kp, 1.3, h_next, 21) ** 2 / kp.sigma_e ** 2
    se = squared.std() / np.sqrt(squared.size)
    assert abs(squared.mean() - quadrature) < 4 * se


def test_eta_update(shng_opt):

    _pp, kp = shng_opt
    eta, clamped = eta_update(kp, 1.2, 0.5)
    assert eta == pytest.approx((1 - kp.theta) * kp.zeta + kp.theta * 1.2 + kp.sigma * 0.5, rel=1e-15)
    assert not clamped

    eta, clamped = eta_update(kp, 0.06, -50.0)
    assert (eta, clamped) == (ETA_FLOOR, True)

    etas, flags = eta_update(kp, np.array([1.0, 0.06]), np.array([0.0, -50.0]))
    assert etas[1] == ETA_FLOOR and list(flags) == [False, True]

    score, eta = scaled_score_and_update(kp, 1.2, 2.0, 4.0)
    assert score == 1.0
    with pytest.raises(DegenerateInformationError, match="Invalid Fisher information"):
        scaled_score_and_update(kp, 1.2, 2.0, 0.0)


def test_score_context(shng_opt):

    pp, kp = shng_opt
    state = FilterState.from_variance(h_next=pp.unconditional_variance, eta=kp.zeta)
    instruments = Instruments(vix_maturity=21)
    context = score_context(pp, kp, state, 1.3, instruments, [0.5], [2.0], standardize=True)
    assert context.gradient == pytest.approx(1.0 / kp.sigma_e ** 2, rel=1e-14)
    assert context.score == pytest.approx(context.gradient / np.sqrt(context.fisher), rel=1e-14)
    assert context.standardized_score is not None
