import pytest

from cascadecool.species import load_species

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def mg():
    return load_species("Mg")


@pytest.fixture(scope="session")
def ca():
    return load_species("Ca")


@pytest.fixture(scope="session")
def cs():
    return load_species("Cs")


@pytest.fixture
def record_criterion():
    def record(number, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
