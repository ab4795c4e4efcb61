import os

import pytest
from hypothesis import HealthCheck, settings

from radosc.grid import DEFAULT_GRID, DEFAULT_WINDOW

settings.register_profile(
    "radosc",
    max_examples=int(os.environ.get("RADOSC_HYPOTHESIS_EXAMPLES", "40")),
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("radosc")

# Filled by tests/test_acceptance.py; printed at the end of the session.
ACCEPTANCE_LINES: dict = {}


@pytest.fixture(scope="session")
def grid():
    return DEFAULT_GRID


@pytest.fixture(scope="session")
def window():
    return DEFAULT_WINDOW


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
