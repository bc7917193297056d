import os
import random

import pytest
from hypothesis import HealthCheck, settings

from acewage.ace import AceState
from acewage.config import DEFAULT_CONFIG
from acewage.wage import WageState

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def cfg():
    return DEFAULT_CONFIG


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_ace(r):
    return AceState.from_int(r.getrandbits(320))


def random_wage(r):
    return WageState(tuple(r.getrandbits(7) for _ in range(37)))
