"""
Pytest configuration and fixtures for soa3 tests.

Provides the shared reference arrays, a config snapshot fixture and the
--run-slow switch for the long exhaustive searches.
"""

import os
from typing import Dict

import pytest

from src.cli.fixtures import fixtures
from src.core.config import SoaConfig, config, use_config
from src.designs.arrays import Array
from src.designs.construct import bush, full_factorial, juxtapose, rao_hamming


# ============================================================================
# Pytest Configuration
# ============================================================================

def pytest_addoption(parser):
    """Register the --run-slow flag."""
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="run tests marked slow",
    )


def pytest_configure(config):
    """Configure pytest with custom settings."""
    config.addinivalue_line("markers", "unit: Unit tests")
    config.addinivalue_line("markers", "integration: Integration tests")
    config.addinivalue_line("markers", "slow: Slow running tests")


def pytest_collection_modifyitems(config, items):
    """Skip slow tests unless asked for."""
    if config.getoption("--run-slow") or os.environ.get("SOA_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="slow: use --run-slow or SOA_RUN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# ============================================================================
# Configuration
# ============================================================================

@pytest.fixture
def restore_config():
    """
    Snapshot the global config and put it back after the test.

    Yields:
        The global config instance, free to modify
    """
    snapshot = SoaConfig.model_validate(config.model_dump())
    yield config
    use_config(snapshot)


# ============================================================================
# Reference Arrays
# ============================================================================

@pytest.fixture(scope="session")
def reference_arrays() -> Dict[str, Array]:
    """The built-in SOA fixtures."""
    return fixtures()


@pytest.fixture(scope="session")
def soa_8() -> Array:
    """The SOA(8, 3, 8, 3) fixture."""
    return fixtures()["soa-8-3-8"]


@pytest.fixture(scope="session")
def soa_54_iii() -> Array:
    return fixtures()["soa-54-5-27-iii"]


@pytest.fixture(scope="session")
def soa_54_iv() -> Array:
    return fixtures()["soa-54-5-27-iv"]


@pytest.fixture(scope="session")
def half_fraction() -> Array:
    """OA(4, 3, 2, 2): rows (0,0,0), (0,1,1), (1,0,1), (1,1,0)."""
    return Array([[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]], 2)


@pytest.fixture(scope="session")
def factorial_2_3() -> Array:
    return full_factorial(2, 3)


@pytest.fixture(scope="session")
def bush_3() -> Array:
    """OA(27, 4, 3, 3)."""
    return bush(3)


@pytest.fixture(scope="session")
def bush_2_extended() -> Array:
    """OA(8, 4, 2, 3)."""
    return bush(2, extended=True)


@pytest.fixture(scope="session")
def doubled_rao_hamming_3() -> Array:
    """OA(18, 4, 3, 2) with every run repeated."""
    base = rao_hamming(3, 2)
    return juxtapose(base, base)


