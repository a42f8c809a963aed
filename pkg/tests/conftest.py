import numpy as np
import pytest
from hypothesis import settings, strategies as st

from sepsim import linalg as la
from sepsim.gates import SWAP

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

CNOT = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
CNOT21 = SWAP @ CNOT @ SWAP
CZ = np.diag([1, 1, 1, -1]).astype(complex)

# lines printed by the acceptance suite, repeated in the terminal summary
ACCEPTANCE_LINES = []


def record(line: str) -> None:
    print(line)
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@st.composite
def unitaries(draw, dim=2):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return la.haar_unitary(np.random.default_rng(seed), dim)


@st.composite
def rngs(draw):
    return np.random.default_rng(draw(st.integers(0, 2 ** 32 - 1)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
