#!/usr/bin/env python3

import json
import math
import os

import numpy as np
import pytest

from shng.exceptions import DomainError, FilteringError
from shng.model import (
    PhysicalParams, KernelParams, FilterState, variance_update, filter_physical_variance, q_day_params,
    q_persistence, physical_persistence, beta_tilde, kernel_coeffs, kernel_intercepts, eta_from_xi,
    log_kernel_quadratic, news_impact_curve, to_risk_neutral_shock, to_physical_shock
)

# Test Values
base_path: str = os.path.dirname(__file__)
file_path: str = os.path.abspath(os.path.join(base_path, "values.json"))
values = open(file_path, "r", encoding="utf-8")
_: dict = json.loads(values.read())
values.close()


@pytest.mark.parametrize("label", list(_["persistence"].keys()))
def test_persistence(label, parameter_set):

    pp, _kp = parameter_set(label)
    assert pp.persistence == pytest.approx(_["persistence"][label]["physical"], abs=1e-3)
    assert pp.is_stationary
    if "beta_tilde" in _["persistence"][label]:
        assert pp.beta_tilde == pytest.approx(_["persistence"][label]["beta_tilde"], abs=1e-3)
    assert pp.beta_tilde > pp.persistence
    assert physical_persistence(pp) == pp.persistence and beta_tilde(pp) == pp.beta_tilde


def test_parameter_domain():

    with pytest.raises(DomainError, match="Invalid alpha"):
        PhysicalParams(omega=0.0, beta=0.5, alpha=-1e-6, gamma=200.0, lam=2.0)
    with pytest.raises(ValueError, match="Invalid gamma"):
        PhysicalParams(omega=0.0, beta=0.5, alpha=1e-6, gamma=math.inf, lam=2.0)
    with pytest.raises(DomainError, match="Invalid theta"):
        KernelParams(theta=1.0, zeta=1.0, sigma=0.05)
    with pytest.raises(DomainError, match="Invalid rho"):
        KernelParams(theta=0.9, zeta=1.0, sigma=0.05, rho=1.0)
    with pytest.raises(DomainError, match="Invalid eta"):
        FilterState(h_next=1e-4, eta=0.0, h_star_next=0.0)

    explosive = PhysicalParams(omega=0.0, beta=0.9, alpha=1e-5, gamma=400.0, lam=2.0)
    assert not explosive.is_stationary
    with pytest.raises(DomainError, match="Invalid physical persistence"):
        explosive.unconditional_variance

    state = FilterState.from_variance(h_next=1e-4, eta=1.3)
    assert state.h_star_next == pytest.approx(1.3e-4, rel=1e-15)


def test_filter_physical_variance(shng_opt):

    pp, _kp = shng_opt
    returns = [0.004, -0.021, 0.013, 0.0, -0.002]
    path = filter_physical_variance(pp, returns)

    assert path.h.shape == (6,) and path.z.shape == (5,)
    assert path.h[0] == pytest.approx(pp.unconditional_variance, rel=1e-15)
    for day, ret in enumerate(returns):
        z = (ret - (pp.lam - 0.5) * path.h[day]) / math.sqrt(path.h[day])
        assert path.z[day] == pytest.approx(z, rel=1e-12)
        assert path.h[day + 1] == pytest.approx(variance_update(pp, path.h[day], z), rel=1e-12)
    # leverage: a negative return raises next-day variance more than an equal positive one
    down = filter_physical_variance(pp, [-0.02]).h_next
    up = filter_physical_variance(pp, [0.02]).h_next
    assert down > up

    with pytest.raises(FilteringError, match=r"day: 2"):
        filter_physical_variance(pp, [0.001, 0.002, math.nan])


def test_q_day_params(shng_opt):

    pp, _kp = shng_opt
    q = q_day_params(pp, 1.0, 1.0)
    assert q.beta_star == pp.beta
    assert q.alpha_star == pp.alpha
    assert q.gamma_star == pytest.approx(pp.gamma + pp.lam, rel=1e-15)
    # at eta = 1 the exact risk-neutral persistence is the approximate one
    assert q_persistence(pp, 1.0, 1.0) == pytest.approx(pp.beta_tilde, rel=1e-12)

    q = q_day_params(pp, 1.3, 1.1)
    assert q.beta_star == pytest.approx(pp.beta * 1.3 / 1.1, rel=1e-15)
    assert q.alpha_star == pytest.approx(pp.alpha * 1.3 * 1.1, rel=1e-15)
    assert q.gamma_star == pytest.approx((pp.gamma + pp.lam - 0.5) / 1.3 + 0.5, rel=1e-15)

    with pytest.raises(DomainError, match="Invalid eta_prev"):
        q_day_params(pp, 1.0, -0.1)


def test_kernel(shng_opt):

    pp, _kp = shng_opt
    for eta in _["eta_levels"]:
        coeffs = kernel_coeffs(pp, eta)
        assert eta_from_xi(pp, coeffs.xi) == pytest.approx(eta, rel=1e-12)
        assert (coeffs.xi > 0) == (eta > 1)
    assert kernel_coeffs(pp, 1.0).xi == 0.0

    # the kernel is U-shaped in the excess return once investors are variance averse
    xi = kernel_coeffs(pp, 1.3).xi
    h = pp.unconditional_variance
    grid = np.linspace(-0.2, 0.2, 401)
    values = log_kernel_quadratic(pp, xi, h, grid)
    assert 0 < np.argmin(values) < grid.size - 1
    assert log_kernel_quadratic(pp, 0.0, h, 0.01) == pytest.approx(-pp.lam * 0.01, rel=1e-15)

    kappa0, kappa1 = kernel_intercepts(pp.replace(omega=1e-6, r=1e-4), xi, 2.0, 0.5, 0.25)
    assert kappa0 == pytest.approx(0.5 + xi * 1e-6 + 2.0 * 1e-4, rel=1e-14)
    assert kappa1 == pytest.approx(0.25 + xi * (pp.beta - 1.0 + pp.alpha * (pp.lam - 0.5 + pp.gamma) ** 2), rel=1e-14)
    shifted = log_kernel_quadratic(pp, xi, h, 0.01, kappa0, kappa1)
    assert shifted - log_kernel_quadratic(pp, xi, h, 0.01) == pytest.approx(kappa0 + kappa1 * h, rel=1e-12)


def test_news_impact_curve(shng_opt):

    pp, _kp = shng_opt
    h_star = 1.3 * pp.unconditional_variance
    grid = np.linspace(-4.0, 4.0, 801)
    values = news_impact_curve(pp, 1.3, 1.3, h_star, grid)
    vertex = pp.gamma * math.sqrt(h_star) / 1.3
    assert grid[np.argmin(values)] == pytest.approx(vertex, abs=0.01)
    assert news_impact_curve(pp, 1.3, 1.3, h_star, 0.0) == 0.0


def test_measure_change(shng_opt):

    pp, _kp = shng_opt
    z = np.array([-2.5, -0.3, 0.0, 1.7])
    h = pp.unconditional_variance
    z_star = to_risk_neutral_shock(pp, z, h, 1.3)
    assert np.allclose(to_physical_shock(pp, z_star, h, 1.3), z, rtol=0, atol=1e-12)
    # at eta = 1 the measure change is a pure shift by lam * sqrt(h)
    assert np.allclose(to_risk_neutral_shock(pp, z, h, 1.0), z + pp.lam * math.sqrt(h), rtol=0, atol=1e-14)
