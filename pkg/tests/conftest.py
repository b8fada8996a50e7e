"""Shared fixtures: parameter points and cached master-equation solves."""

import pytest
from click.testing import CliRunner

from atomlaser.services.oracle import steady_state
from atomlaser.services.params import from_dimensionless, reduced


@pytest.fixture
def table_params():
    """First comparison-table column with its printed saturation label."""
    return reduced(20.0, 95.95, 100.0)


@pytest.fixture(scope="session")
def lasing_state():
    """Stationary state above threshold at I_s=2, c=40, r=3 with N=80."""
    return steady_state(from_dimensionless(3.0, 2.0, 40.0), 80)


@pytest.fixture(scope="session")
def weak_state():
    """Stationary state at I_s=1, c=10, r=1 with N=40."""
    return steady_state(from_dimensionless(1.0, 1.0, 10.0), 40)


@pytest.fixture
def runner():
    """Create a Click test runner."""
    return CliRunner()
