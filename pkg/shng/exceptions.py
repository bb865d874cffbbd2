#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from typing import (
    Optional, List, Tuple
)


class SHNGError(ValueError):
    """
    Base class of every error raised by the ``shng`` package.
    """


class DomainError(SHNGError):
    pass


class ConfigError(SHNGError):
    pass


class FilteringError(SHNGError):
    """
    Raised when the variance or score recursion cannot continue.

    :param message: Message
    :type message: str
    :param day: Offending day index (0-based), default to ``None``
    :type day: Optional[int]
    """

    def __init__(self, message: str, day: Optional[int] = None):
        self.day: Optional[int] = day
        super().__init__(message if day is None else f"{message} (day: {day})")


class PricingError(SHNGError):
    """
    Raised when a closed-form price cannot be evaluated.

    :param message: Message
    :type message: str
    :param step: Offending recursion step, default to ``None``
    :type step: Optional[int]
    """

    def __init__(self, message: str, step: Optional[int] = None):
        self.step: Optional[int] = step
        super().__init__(message if step is None else f"{message} (step: {step})")


class ConsistencyError(SHNGError):
    pass


class SensitivityError(SHNGError):
    pass


class DegenerateInformationError(SHNGError):
    pass


class EstimationError(SHNGError):
    pass


class GridMismatchError(SHNGError):
    pass


class IngestError(SHNGError):
    """
    Raised when input files cannot be aligned or exceed their error budget.

    :param message: Message
    :type message: str
    :param errors: Collected ``(file, line, reason)`` triples, default to ``None``
    :type errors: Optional[List[Tuple[str, int, str]]]
    """

    def __init__(self, message: str, errors: Optional[List[Tuple[str, int, str]]] = None):
        self.errors: List[Tuple[str, int, str]] = list(errors or [])
        super().__init__(message)
