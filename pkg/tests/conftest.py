import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from triesz import AlgebraElement, StarHomomorphism

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def first_block():
    """(2,1) -> (2): keep the first block, kill the second."""
    return StarHomomorphism([2, 1], [2], [[1, 0]])


@pytest.fixture
def diag125():
    return AlgebraElement([np.diag([1.0, 2.0]), [[5.0]]])


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def elem(*blocks):
    return AlgebraElement([np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks])
