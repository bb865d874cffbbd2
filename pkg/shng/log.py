#!/usr/bin/env python3

# Copyright © 2026, SHNG Pricing Developers
# Distributed under the MIT software license, see the accompanying
# file COPYING or https://opensource.org/license/mit

from typing import (
    Optional, Union
)

import logging
import os

# Default record layout
LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"
# Environment override for the default level
LOG_LEVEL_ENV: str = "SHNG_LOG_LEVEL"


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


def setup_logging(level: Optional[Union[int, str]] = None, fmt: str = LOG_FORMAT) -> logging.Logger:
    """
    Configure the ``shng`` logger hierarchy for command-line use.

    :param level: Logging level, default to ``SHNG_LOG_LEVEL`` or ``INFO``
    :type level: Optional[Union[int, str]]
    :param fmt: Record format, default to ``LOG_FORMAT``
    :type fmt: str

    :returns: logging.Logger -- The package root logger
    """

    if level is None:
        level = os.environ.get(LOG_LEVEL_ENV, "INFO")
    if isinstance(level, str):
        level = level.upper()
    root = logging.getLogger("shng")
    root.setLevel(level)
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(fmt))
        root.addHandler(handler)
    return root
