import numpy as np
import pytest

from sdtw_readuntil import build_index, synthetic_pore_model


def random_bases(n, seed):
    rng = np.random.default_rng(seed)
    return "".join(rng.choice(list("ACGT"), n))


@pytest.fixture(scope="session")
def model():
    return synthetic_pore_model(6, seed=1)


@pytest.fixture(scope="session")
def reference():
    return "ref", random_bases(10_000, 7)


@pytest.fixture(scope="session")
def index(model, reference):
    name, bases = reference
    return build_index(bases, model, name=name)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
