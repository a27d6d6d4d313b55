"""
Shared fixtures.

Heavy end-to-end checks (Airy tables, contour integrals, long oscillator
ladders) are marked slow and only run with --runslow.
"""

import math

import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker

from app.database import Base
from app.models import BPSInvariant, RunRecord  # noqa: F401
from app.services.enumerative_service import default_table
from app.services.kernel_service import kernel_params
from app.services.periods_service import periods


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: end-to-end numerical checks (deselected without --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def period_data():
    """Period series at order 40: enough for |z| <= e^{-4}."""
    return periods(40)


@pytest.fixture(scope="session")
def bps_table():
    return default_table()


@pytest.fixture(scope="session")
def p2_kernel():
    return kernel_params(1, 1, 2 * math.pi)


@pytest.fixture(scope="session")
def p2_kernel_third():
    return kernel_params(1, 1, 2 * math.pi / 3)


@pytest.fixture
def db_session():
    """Session on a fresh in-memory SQLite database."""
    engine = create_engine("sqlite://", connect_args={"check_same_thread": False})
    Base.metadata.create_all(bind=engine)
    session = sessionmaker(autocommit=False, autoflush=False, bind=engine)()
    try:
        yield session
    finally:
        session.close()
        engine.dispose()
