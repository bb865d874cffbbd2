#!/usr/bin/env python3

import json
import math
import os

import numpy as np
import pytest

from shng.exceptions import DomainError
from shng.model import KernelParams, PhysicalParams
from shng.utils import VIX_ANNUALIZER
from shng.vix import (
    vix_terms_closed, vix_terms_bruteforce, vix_term_derivatives, vix_price, delta_bound,
    expected_variance_path, vix_decomposition, ar1_moments, ar1_cross_moment
)

# Test Values
base_path: str = os.path.dirname(__file__)
file_path: str = os.path.abspath(os.path.join(base_path, "values.json"))
values = open(file_path, "r", encoding="utf-8")
_: dict = json.loads(values.read())
values.close()


@pytest.mark.parametrize("label", list(_["parameters"].keys()))
def test_vix_terms_closed(label, parameter_set):

    pp, kp = parameter_set(label)
    for M in _["vix_maturities"]:
        for eta in _["eta_levels"]:
            closed = vix_terms_closed(pp, kp, eta, M)
            brute = vix_terms_bruteforce(pp, kp, eta, M)
            assert closed.a1 == pytest.approx(brute.a1, rel=1e-10, abs=1e-300)
            assert closed.a2 == pytest.approx(brute.a2, rel=1e-10, abs=1e-300)
            assert closed.a3 == pytest.approx(brute.a3, rel=1e-10)
        # the built-in cross-check raises on any mismatch
        vix_terms_closed(pp, kp, np.array(_["eta_levels"]), M, check=True)


def test_vix_terms_random_sweep():

    rng = np.random.Generator(np.random.Philox(11))
    draws = 0
    while draws < 1000:
        pp = PhysicalParams(omega=float(rng.uniform(0.0, 1e-6)), beta=float(rng.uniform(0.3, 0.95)),
                            alpha=float(rng.uniform(1e-6, 1e-5)), gamma=float(rng.uniform(0.0, 400.0)),
                            lam=float(rng.uniform(0.0, 3.0)))
        if not pp.beta_tilde < 0.999:
            continue
        kp = KernelParams(theta=float(rng.uniform(0.0, 0.995)), zeta=float(rng.uniform(0.5, 2.0)),
                          sigma=float(rng.uniform(0.0, 0.3)))
        eta = float(rng.uniform(0.2, 3.0))
        for M in (1, 2, 21, 63, 126):
            closed = vix_terms_closed(pp, kp, eta, M)
            brute = vix_terms_bruteforce(pp, kp, eta, M)
            assert closed.a1 == pytest.approx(brute.a1, rel=1e-10, abs=1e-300)
            assert closed.a2 == pytest.approx(brute.a2, rel=1e-10, abs=1e-300)
            assert closed.a3 == pytest.approx(brute.a3, rel=1e-10)
        draws += 1


def test_vix_one_day(shng_opt):

    pp, kp = shng_opt
    terms = vix_terms_closed(pp, kp, 1.3, 1)
    assert (terms.a1, terms.a2, terms.a3) == (0.0, 0.0, 1.0)
    h_star = 1.3 * pp.unconditional_variance
    assert vix_price(pp, kp, 1.3, h_star, 1).value == pytest.approx(VIX_ANNUALIZER * math.sqrt(h_star), rel=1e-14)


def test_vix_vectorized(shng_vix):

    pp, kp = shng_vix
    eta = np.array(_["eta_levels"])
    h_star = eta * pp.unconditional_variance
    quote = vix_price(pp, kp, eta, h_star, 21)
    assert quote.value.shape == eta.shape
    for index in range(eta.size):
        assert quote.value[index] == pytest.approx(vix_price(pp, kp, eta[index], h_star[index], 21).value, rel=1e-14)
    with pytest.raises(DomainError, match="Invalid eta_t"):
        vix_price(pp, kp, np.array([1.0, 0.0]), h_star[:2], 21)


def test_ar1_moments(shng_opt):

    _pp, kp = shng_opt
    mean, second = ar1_moments(kp, 1.5, 0)
    assert mean == 1.5 and second == pytest.approx((1.5 - kp.zeta) ** 2, rel=1e-14)
    mean, second = ar1_moments(kp, 1.5, 10_000)
    assert mean == pytest.approx(kp.zeta, rel=1e-12)
    assert second == pytest.approx(kp.stationary_variance, rel=1e-12)
    # the cross moment at equal horizons is the raw second moment
    mean, second = ar1_moments(kp, 1.5, 5)
    assert ar1_cross_moment(kp, 1.5, 5, 5) == pytest.approx(second + 2 * kp.zeta * mean - kp.zeta ** 2, rel=1e-14)


def test_vix_term_derivatives(shng_opt):

    pp, kp = shng_opt
    step = 1e-6
    for M in (21, 126):
        da1, da3 = vix_term_derivatives(pp, kp, 1.3, M)
        up, down = vix_terms_closed(pp, kp, 1.3 + step, M), vix_terms_closed(pp, kp, 1.3 - step, M)
        assert da1 == pytest.approx((up.a1 - down.a1) / (2 * step), rel=1e-6)
        assert da3 == pytest.approx((up.a3 - down.a3) / (2 * step), rel=1e-6)


def test_vix_decomposition(shng_opt):

    pp, kp = shng_opt
    frame = vix_decomposition(pp, kp, maturities=_["decomposition"]["maturities"])
    assert list(frame.columns) == ["maturity", "a1_share", "a2_share", "a3_share", "psi_ratio", "vix"]
    assert np.allclose(frame[["a1_share", "a2_share", "a3_share"]].sum(axis=1), 1.0, rtol=0, atol=1e-12)

    # the innovation term grows in importance with the horizon
    assert frame["a2_share"].is_monotonic_increasing
    assert frame["psi_ratio"].is_monotonic_increasing
    short, long = frame.iloc[0], frame.iloc[-1]
    bands = _["decomposition"]
    assert bands["a2_share"]["short"][0] < short["a2_share"] < bands["a2_share"]["short"][1]
    assert bands["a2_share"]["long"][0] < long["a2_share"] < bands["a2_share"]["long"][1]
    assert bands["psi_ratio"]["short"][0] < short["psi_ratio"] < bands["psi_ratio"]["short"][1]
    assert bands["psi_ratio"]["long"][0] < long["psi_ratio"] < bands["psi_ratio"]["long"][1]


def test_vix_decomposition_over_states(shng_opt):

    pp, kp = shng_opt
    maturities = (21, 126)
    h_bar = pp.unconditional_variance
    single = vix_decomposition(pp, kp, maturities, 0.9, 0.9 * h_bar)
    assert vix_decomposition(pp, kp, maturities, [0.9], [0.9 * h_bar]).equals(single)

    low = vix_decomposition(pp, kp, maturities, 0.73, 0.73 * h_bar)
    high = vix_decomposition(pp, kp, maturities, 1.69, 1.69 * h_bar)
    both = vix_decomposition(pp, kp, maturities, [0.73, 1.69], [0.73 * h_bar, 1.69 * h_bar])
    for column in ("a2_share", "psi_ratio", "vix"):
        assert np.allclose(both[column], 0.5 * (low[column] + high[column]), rtol=1e-12)
    # calm states carry a larger innovation share
    assert (low["psi_ratio"] > high["psi_ratio"]).all()


def test_vix_decomposition_deterministic_kernel(hng_vix):

    pp, kp = hng_vix
    frame = vix_decomposition(pp, kp)
    assert (frame["a2_share"] == 0.0).all()
    assert (frame["psi_ratio"] == 0.0).all()


def test_delta_bound(shng_opt):

    pp, kp = shng_opt
    h_star = kp.zeta * pp.unconditional_variance
    for M in (21, 63, 126):
        low, high = delta_bound(pp, kp, 0.73, 1.69, h_star, M)
        vix = vix_price(pp, kp, kp.zeta, h_star, M).value
        assert low <= vix <= high
    low, high = delta_bound(pp, kp, 1.0, 1.0, h_star, 21)
    assert low == pytest.approx(high, rel=1e-15)
    with pytest.raises(DomainError, match="Invalid eta bounds"):
        delta_bound(pp, kp, 1.5, 1.0, h_star, 21)


def test_expected_variance_path(shng_opt):

    pp, _kp = shng_opt
    h_star = pp.unconditional_variance
    # with eta fixed at one the risk-neutral variance follows the approximate persistence
    path = expected_variance_path(pp, np.ones(21), h_star, 21)
    assert path[0] == h_star
    for k in range(1, 21):
        assert path[k] == pytest.approx(pp.alpha + pp.beta_tilde * path[k - 1], rel=1e-12)
    with pytest.raises(ValueError, match="Invalid eta path length"):
        expected_variance_path(pp, np.ones(5), h_star, 21)
