#!/usr/bin/env python3

from setuptools import (
    setup, find_packages
)

# Project URL's
project_urls: dict = {
    "Tracker": "https://github.com/shng-pricing/shng-pricing/issues"
}

# README.md
with open("README.md", "r", encoding="utf-8") as readme:
    long_description: str = readme.read()

# requirements.txt
with open("requirements.txt", "r") as _requirements:
    requirements: list = list(filter(None, map(str.strip, _requirements.read().split("\n"))))

setup(
    name="shng-pricing",
    version="v0.1.0",
    description="Python library for score-driven Heston-Nandi GARCH pricing of VIX and index options.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="MIT",
    author="SHNG Pricing Developers",
    author_email="shng-pricing@users.noreply.github.com",
    url="https://github.com/shng-pricing/shng-pricing",
    project_urls=project_urls,
    keywords=[
        "garch", "heston-nandi", "option-pricing", "vix", "variance-risk-premium", "score-driven", "gas", "monte-carlo"
    ],
    python_requires=">=3.9,<4",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=requirements,
    entry_points={
        "console_scripts": [
            "shng=shng.cli:main"
        ]
    },
    extras_require={
        "tests": [
            "pytest>=7.4.0,<8",
            "pytest-cov>=4.1.0,<5"
        ]
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Office/Business :: Financial :: Investment",
        "Topic :: Scientific/Engineering :: Mathematics"
    ]
)
