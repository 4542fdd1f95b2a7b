"""
Shared pytest setup
===================

Small ensembles used across the test modules, plus the ``slow`` marker:
checks that run the evolution solvers at published scale only run with
``pytest --runslow``.
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.ensemble import EnsembleParams  # noqa: E402
from src.sampler import sample_graph  # noqa: E402

collect_ignore_glob = ["examples/*"]


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run slow checks against published values")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: published-scale check, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def tiny_params():
    """(3, 6, 2, 2) with M=4: the hand-checkable profile."""
    return EnsembleParams(dv=3, dc=6, L=2, alpha=2, M=4)


@pytest.fixture
def small_params():
    """(3, 6, 3, 1.1) with M=40; quick to sample and to integrate."""
    return EnsembleParams(dv=3, dc=6, L=3, alpha="11/10", M=40)


@pytest.fixture
def small_graph(small_params):
    return sample_graph(small_params, seed=7)
