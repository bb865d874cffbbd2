#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from typing import (
    AnyStr, Union, Sequence
)

import hashlib
import math

import numpy as np

# Trading days per year
TRADING_DAYS_PER_YEAR: int = 252
# Calendar days per year
CALENDAR_DAYS_PER_YEAR: int = 365
# VIX annualizer, 100·√252
VIX_ANNUALIZER: float = 100.0 * math.sqrt(TRADING_DAYS_PER_YEAR)


def get_bytes(data: AnyStr) -> bytes:
    """
    Any string to bytes converter

    :param data: Data
    :type data: AnyStr

    :returns: bytes -- Data
    """

    if not data:
        return b''
    if isinstance(data, bytes):
        return data
    elif isinstance(data, str):
        return bytes(data, 'utf-8')
    else:
        raise TypeError(f"Invalid data type (expected: bytes or str, got: {type(data).__name__})")


def sha256(data: AnyStr) -> str:
    """
    SHA-256 hex digest

    :param data: Data
    :type data: AnyStr

    :returns: str -- Hex digest
    """

    return hashlib.sha256(get_bytes(data)).hexdigest()


def ensure_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"Invalid {name} (expected: finite number, got: {value})")
    return value


def ensure_positive(name: str, value: float, strict: bool = True) -> float:
    """
    Validate a positive real number.

    :param name: Name used in the error message
    :type name: str
    :param value: Value
    :type value: float
    :param strict: Reject zero, default to ``True``
    :type strict: bool

    :returns: float -- Value
    """

    value = ensure_finite(name, value)
    if (value <= 0) if strict else (value < 0):
        raise ValueError(
            f"Invalid {name} (expected: {'> 0' if strict else '>= 0'}, got: {value})"
        )
    return value


def ensure_maturity(maturity: int) -> int:
    if isinstance(maturity, bool) or int(maturity) != maturity or maturity < 1:
        raise ValueError(f"Invalid maturity (expected: integer >= 1, got: {maturity})")
    return int(maturity)


def power_sum(x: float, n: int) -> float:
    """
    Sum of powers :math:`x + x^2 + ... + x^n`, accurate near :math:`x = 1`.

    :param x: Base
    :type x: float
    :param n: Number of terms
    :type n: int

    :returns: float -- Sum, ``0`` when ``n <= 0``
    """

    if n <= 0:
        return 0.0
    if x == 1.0:
        return float(n)
    if x > 0.0 and abs(x - 1.0) < 1e-3:
        return x * math.expm1(n * math.log1p(x - 1.0)) / (x - 1.0)
    return x * (1.0 - x ** n) / (1.0 - x)


def geometric_series(x: float, n: int) -> float:
    """
    Sum :math:`1 + x + ... + x^{n-1}`.

    :param x: Ratio
    :type x: float
    :param n: Number of terms
    :type n: int

    :returns: float -- Sum
    """

    if n <= 0:
        return 0.0
    return 1.0 + power_sum(x, n - 1)


def trading_days(calendar_days: Union[int, float, Sequence[float], np.ndarray],
                 ratio: float = TRADING_DAYS_PER_YEAR / CALENDAR_DAYS_PER_YEAR) -> Union[int, np.ndarray]:
    """
    Convert calendar days to maturity into whole trading days.

    :param calendar_days: Calendar days to maturity
    :type calendar_days: Union[int, float, Sequence[float], numpy.ndarray]
    :param ratio: Trading to calendar ratio, default to ``252/365``
    :type ratio: float

    :returns: Union[int, numpy.ndarray] -- Trading days, at least one
    """

    days = np.maximum(np.rint(np.asarray(calendar_days, dtype=float) * ratio), 1).astype(int)
    return int(days) if days.ndim == 0 else days


def years(maturity_days: Union[int, float, np.ndarray]) -> Union[float, np.ndarray]:
    value = np.asarray(maturity_days, dtype=float) / TRADING_DAYS_PER_YEAR
    return float(value) if value.ndim == 0 else value
