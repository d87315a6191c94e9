import numpy as np
import pytest

from invariant_stirap import ProtocolSpec, design

TF = 4.0


@pytest.fixture(scope="session")
def p1_design():
    return design(ProtocolSpec(1, 0.2, TF))


@pytest.fixture(scope="session")
def p2_design():
    return design(ProtocolSpec(2, 0.2, TF, np.pi / 4))


@pytest.fixture
def rng():
    return np.random.default_rng(20120517)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
