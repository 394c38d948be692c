import numpy as np
import pytest

from periabc.harness import cached_kernels
from periabc.stencil import bar_stencil, beam_stencil


@pytest.fixture(scope="session")
def beam():
    return beam_stencil()


@pytest.fixture(scope="session")
def bar():
    return bar_stencil()


@pytest.fixture(scope="session")
def kernels():
    """``kernels(stencil, dt, T)``; tables are shared by every test in the session."""
    return cached_kernels


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """``criterion(name, passed, detail)`` records one PASS/FAIL line for the summary."""

    def record(name, passed, detail=""):
        line = f"{'PASS' if passed else 'FAIL'}  {name}  {detail}".rstrip()
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
