import numpy as np
import pytest

from pointmembrane import ModelParams, build_icosphere

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def params():
    return ModelParams(1.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def meshes(params):
    cache = {}

    def get(level):
        if level not in cache:
            cache[level] = build_icosphere(params, level)
        return cache[level]
    return get


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
