from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from eqdisc.toric import ToricInput

FANS = Path(__file__).resolve().parent.parent / "data" / "fans"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def fan(name: str) -> ToricInput:
    return ToricInput.load(FANS / f"{name}.json")


@pytest.fixture
def fans_dir():
    return FANS


@pytest.fixture
def p1():
    return fan("p1")


@pytest.fixture
def p2():
    return fan("p2")


@pytest.fixture
def p1p1():
    return fan("p1p1")


@pytest.fixture
def f2():
    return fan("f2")


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    lines = test_acceptance.report_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
