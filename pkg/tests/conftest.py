import pytest

from nearpoly import polar

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def h33():
    return polar.build_hamming_graph(3, 3)


@pytest.fixture(scope="session")
def c32():
    return polar.build_dual_polar_graph(polar.make_polar_space("C", 3, 2))


@pytest.fixture(scope="session")
def b32():
    return polar.build_dual_polar_graph(polar.make_polar_space("B", 3, 2))


@pytest.fixture
def acceptance_line():
    """Record a PASS/FAIL line that is echoed in the terminal summary."""
    def record(criterion: str, ok: bool, detail: str = ""):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {criterion}  {detail}".rstrip()
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
