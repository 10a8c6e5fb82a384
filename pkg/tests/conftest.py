import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from varcmo import ExponentFunction, Grid, build_family
from varcmo.signals import band_noise, make_rng

settings.register_profile("varcmo", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("varcmo")


@pytest.fixture(scope="session")
def g8():
    return Grid(8)


@pytest.fixture(scope="session")
def g6():
    return Grid(6)


@pytest.fixture(scope="session")
def meyer8(g8):
    return build_family(g8, window_kind="meyer_smooth")


@pytest.fixture(scope="session")
def shannon8(g8):
    return build_family(g8, window_kind="shannon_sharp")


@pytest.fixture(scope="session")
def meyer6(g6):
    return build_family(g6, window_kind="meyer_smooth")


@pytest.fixture(scope="session")
def shannon6(g6):
    return build_family(g6, window_kind="shannon_sharp")


@pytest.fixture
def noise8(meyer8):
    return band_noise(meyer8, make_rng(123, 0))


def const(grid, value):
    return ExponentFunction.constant(grid, value)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
