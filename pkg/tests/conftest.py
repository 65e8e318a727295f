import numpy as np
import pytest

from induction_inverse.lattice import TorusLattice

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)
F2 = (1.0, SQRT2)
F3 = (1.0, SQRT2, SQRT3)


@pytest.fixture
def lat2():
    return TorusLattice((1.0, 1.0), (16, 16))


@pytest.fixture
def lat3():
    return TorusLattice((1.0, 1.0, 1.0), (8, 8, 8))


def rel(a, b):
    """Relative spectral distance between two fields."""
    num = np.sqrt(np.sum(np.abs(a.coeffs - b.coeffs) ** 2))
    den = np.sqrt(np.sum(np.abs(b.coeffs) ** 2))
    return float(num / den) if den > 0 else float(num)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
