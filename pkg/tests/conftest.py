import math

import pytest
from hypothesis import HealthCheck, settings

from soliton_lab import IntegratorControls

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def long_span():
    return IntegratorControls(max_r_span=40.0)


def assert_close(x, y, tol, what=""):
    assert math.isclose(x, y, rel_tol=0, abs_tol=tol), f"{what}: {x!r} vs {y!r} (tol {tol})"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
