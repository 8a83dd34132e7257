import numpy as np
import pytest

from utlearn.generative import SamplerConfig, synthesize


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_model():
    return synthesize(SamplerConfig(n=8, n_cols=200, s=2, seed=3))


@pytest.fixture(scope="session")
def normalized_model():
    return synthesize(SamplerConfig(n=20, n_cols=2000, s=3, seed=11, normalize=True))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
