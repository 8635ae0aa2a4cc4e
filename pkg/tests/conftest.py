import math
import sys

import pytest

from paramosc.classical import CosineDrive, ErmakovParams, SechPulse
from paramosc.factorization import SeedSpec

SQRT2 = math.sqrt(2.0)


@pytest.fixture(scope="session")
def harmonic():
    return CosineDrive(), ErmakovParams(1.0, 1.0)


@pytest.fixture(scope="session")
def driven():
    return CosineDrive(amplitude=1.0, F0=1.0, alpha=3.0), ErmakovParams(SQRT2, SQRT2)


@pytest.fixture(scope="session")
def sech():
    return SechPulse(), ErmakovParams(1.0, 1.0)


@pytest.fixture(scope="session")
def m4():
    return SeedSpec.one_step(4)


@pytest.fixture(scope="session")
def m45():
    return SeedSpec.two_step(4, 5)



def pytest_terminal_summary(terminalreporter):
    # repeat the acceptance verdicts at the end of the run
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
