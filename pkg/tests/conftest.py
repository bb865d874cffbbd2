#!/usr/bin/python3

import json
import pytest
import os

from shng.model import (
    KernelParams, PhysicalParams
)

with open(os.path.join(os.path.dirname(__file__), "values.json"), "r", encoding="utf-8") as values:
    _: dict = json.load(values)


def parameters(label: str):
    column = _["parameters"][label]
    return PhysicalParams(**column["physical"]), KernelParams(**column["kernel"])


@pytest.fixture(scope="session")
def parameter_set():
    return parameters


@pytest.fixture(scope="module")
def shng_opt():
    return parameters("SHNG[Opt]")


@pytest.fixture(scope="module")
def shng_vix():
    return parameters("SHNG[VIX]")


@pytest.fixture(scope="module")
def hng_vix():
    return parameters("HNG[VIX]")


@pytest.fixture()
def fixture_dir(tmp_path):
    directory = tmp_path / "data"
    directory.mkdir()
    return directory
