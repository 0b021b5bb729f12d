import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("zml", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("zml")


def pytest_configure(config):
    config.acceptance_lines = []


@pytest.fixture
def record_criterion(request):
    """Print and keep one ``criterion N: PASS/FAIL ...`` line for the summary."""

    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        request.config.acceptance_lines.append((number, line))
        return passed

    return record


@pytest.fixture(scope="session")
def table_1e6():
    from zml.primes import sieve

    return sieve(10**6)


@pytest.fixture(scope="session")
def table_1e5():
    from zml.primes import sieve

    return sieve(10**5)


def pytest_terminal_summary(terminalreporter):
    lines = getattr(terminalreporter.config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
