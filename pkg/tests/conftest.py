"""Pytest configuration and shared fixtures for the antenna-select test suite."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import configure_logging
from src.selection.types import TransmitConfig


@pytest.fixture(autouse=True)
def quiet_logging():
    """Warnings and above only, written to the current sys.stderr."""
    configure_logging(0)
    yield


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for ad-hoc draws inside a test."""
    return np.random.default_rng(20240611)


@pytest.fixture
def unit_power_4tx() -> TransmitConfig:
    return TransmitConfig(power=1.0, num_tx=4)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Runner environment overrides must not leak in from the shell."""
    monkeypatch.delenv("ANTSEL_WORKERS", raising=False)
    monkeypatch.delenv("ANTSEL_ENUMERATION_BUDGET", raising=False)


# Test markers
def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line("markers", "unit: Fast unit tests")
    config.addinivalue_line("markers", "integration: Component integration tests")
    config.addinivalue_line("markers", "e2e: End-to-end tests")
    config.addinivalue_line("markers", "slow: Tests that take >1s")
    config.addinivalue_line("markers", "regression: Regression tests for fixed bugs")
    config.addinivalue_line("markers", "skip_ci: Skip in CI environments")


# Timeout configuration
def pytest_collection_modifyitems(config, items):
    """Modify test collection to add timeout based on markers."""
    for item in items:
        if item.get_closest_marker("timeout"):
            continue
        if item.get_closest_marker("slow"):
            item.add_marker(pytest.mark.timeout(300))
        elif item.get_closest_marker("unit"):
            item.add_marker(pytest.mark.timeout(20))
        else:
            item.add_marker(pytest.mark.timeout(60))
