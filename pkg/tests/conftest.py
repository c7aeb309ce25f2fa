"""Pytest configuration and shared fixtures."""

import numpy as np
import pytest

from regtrig.core.presets import get_preset
from regtrig.harness.runner import run_scenario


# ============================================================================
# Fixtures
# ============================================================================


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so randomized checks are reproducible."""
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def fig4_run():
    """The undisturbed event-triggered run, shared by the closed-loop tests."""
    return run_scenario(get_preset("fig4"))


@pytest.fixture(scope="session")
def lti_run():
    """Scalar linear plant with theta = 2 started from theta_hat = 0."""
    return run_scenario(get_preset("lti_scalar"))


# ============================================================================
# Pytest Configuration
# ============================================================================


def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line("markers", "slow: long closed-loop simulations")
