"""Shared fixtures. The kernel is compiled once up front so no test ever
times JIT compilation."""

import pytest

from labelgrid.selector import ensure_warm
from labelgrid.trellis import load_default_table


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    ensure_warm()


@pytest.fixture(scope="session")
def table():
    return load_default_table()
