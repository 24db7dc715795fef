import pytest

from graphzeta.builders import FIXTURES, LATTICES, periodic_lattice
from graphzeta.operators import FiniteContext


@pytest.fixture(scope="session")
def graphs():
    return {name: make() for name, make in FIXTURES.items()}


@pytest.fixture(scope="session")
def contexts(graphs):
    return {name: FiniteContext(g) for name, g in graphs.items()}


@pytest.fixture(scope="session")
def z_lattice():
    return periodic_lattice(LATTICES["Z"], 12)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
