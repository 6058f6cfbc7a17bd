import numpy as np
import pytest

from mubw.finite_field import field_for_order

ACCEPTANCE_LOG: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def F3():
    return field_for_order(3)


@pytest.fixture(scope="session")
def F7():
    return field_for_order(7)


@pytest.fixture(scope="session")
def F27():
    return field_for_order(27)


def random_hermitian(d, rng):
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (X + X.conj().T) / 2


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
