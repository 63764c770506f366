import numpy as np
import pytest

from haarconv import FiniteHomogeneousSpace, Subgroup, builtin_group


@pytest.fixture
def S3():
    return builtin_group("S3")


@pytest.fixture
def D4():
    return builtin_group("D4")


@pytest.fixture
def X_S3(S3):
    return FiniteHomogeneousSpace(Subgroup.generated_by(S3, ["(12)"]))


@pytest.fixture
def X_D4(D4):
    return FiniteHomogeneousSpace(Subgroup.generated_by(D4, ["(24)"]))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
