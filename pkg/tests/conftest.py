import os
import random

import pytest
from hypothesis import HealthCheck, settings

from netforge.combinat import OlsPair, cyclic, enumerate_latin
from netforge.equivalence import tau_squares

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def squares4():
    return list(enumerate_latin(4))


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture(scope="session")
def hessian_pair():
    return OlsPair(cyclic(3, 1), cyclic(3, 2))


@pytest.fixture(scope="session")
def tau_pair():
    L1, L2, _ = tau_squares()
    return OlsPair(L1, L2)


@pytest.fixture(scope="session")
def pair5a():
    return OlsPair(cyclic(5, 1), cyclic(5, 4))


@pytest.fixture(scope="session")
def pair5b():
    return OlsPair(cyclic(5, 1), cyclic(5, 3))



def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
