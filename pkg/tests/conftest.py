import numpy as np
import pytest

from mwca.io import load_health_survey

# published survey counts, males then females; rows are age groups
MALES = [
    [145, 402, 84, 5, 3],
    [112, 414, 74, 13, 2],
    [80, 331, 82, 24, 4],
    [54, 231, 102, 22, 6],
    [30, 219, 119, 53, 12],
    [18, 125, 110, 35, 4],
    [9, 67, 65, 25, 8],
]
FEMALES = [
    [98, 387, 83, 13, 3],
    [108, 395, 90, 22, 4],
    [67, 327, 99, 17, 4],
    [36, 238, 134, 28, 10],
    [23, 195, 187, 53, 18],
    [26, 142, 174, 63, 16],
    [11, 69, 92, 41, 9],
]
AGES = ["16-24", "25-34", "35-44", "45-54", "55-64", "65-74", "75+"]
HEALTH = ["Very good", "Good", "Regular", "Bad", "Very bad"]

ACCEPTANCE_LINES = []


@pytest.fixture
def health():
    return load_health_survey()


@pytest.fixture
def health_counts():
    return np.array([MALES, FEMALES], dtype=float)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
