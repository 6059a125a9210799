import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from vqad.statevector import StateVector

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_state(rng, n, real=False):
    v = rng.normal(size=2**n)
    if not real:
        v = v + 1j * rng.normal(size=2**n)
    return StateVector(n, v / np.linalg.norm(v))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# acceptance lines are collected here and echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
