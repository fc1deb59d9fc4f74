import numpy as np
import pytest

from quantum_rsp import classical_state, entangled_state, make_rsp_matrix, uniform_state



@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def rsp():
    return make_rsp_matrix(-0.5)


@pytest.fixture
def classical():
    return classical_state()


@pytest.fixture
def entangled():
    return entangled_state()


@pytest.fixture
def uniform():
    return uniform_state()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
