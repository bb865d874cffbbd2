#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from typing import Tuple
from functools import lru_cache

import numpy as np

# Node count used for every Fourier and Gaussian expectation
DEFAULT_NODES: int = 32


@lru_cache(maxsize=16)
def _laguerre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.laguerre.laggauss(n)
    compensated = np.exp(np.log(weights) + nodes)
    nodes.setflags(write=False)
    compensated.setflags(write=False)
    return nodes, compensated


@lru_cache(maxsize=16)
def _hermite(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.hermite.hermgauss(n)
    nodes = nodes * np.sqrt(2.0)
    weights = weights / np.sqrt(np.pi)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_laguerre(n: int = DEFAULT_NODES) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Laguerre nodes with :math:`e^{x}`-compensated weights, so that
    :math:`\\int_0^\\infty f(x)dx \\approx \\sum_i w_i f(x_i)`.

    :param n: Number of nodes, default to ``32``
    :type n: int

    :returns: Tuple[numpy.ndarray, numpy.ndarray] -- Nodes and compensated weights
    """

    if n < 2:
        raise ValueError(f"Invalid node count (expected: >= 2, got: {n})")
    return _laguerre(int(n))


def gauss_hermite(n: int = DEFAULT_NODES) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Hermite nodes and weights for expectations under a standard normal,
    :math:`E[f(Z)] \\approx \\sum_i w_i f(z_i)`.

    :param n: Number of nodes, default to ``32``
    :type n: int

    :returns: Tuple[numpy.ndarray, numpy.ndarray] -- Nodes scaled by √2 and weights divided by √π
    """

    if n < 2:
        raise ValueError(f"Invalid node count (expected: >= 2, got: {n})")
    return _hermite(int(n))
