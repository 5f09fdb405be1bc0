import pytest
from hypothesis import HealthCheck, settings

from buildings import catalog
from buildings.building import join, rank_one_building

settings.register_profile(
    "suite", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("suite")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fano():
    return catalog.fano()


@pytest.fixture(scope="session")
def gq():
    return catalog.gq22()


@pytest.fixture(scope="session")
def digon():
    return catalog.digon()


@pytest.fixture(scope="session")
def hexagon():
    return catalog.thin_hexagon()


@pytest.fixture(scope="session")
def square():
    return catalog.thin_square()


@pytest.fixture(scope="session")
def fano_a1():
    return join(catalog.fano(), rank_one_building(2, "2"))
