import math

import numpy as np
import pytest

from chessbilliard import Polygon

ACCEPTANCE_LINES = []


@pytest.fixture
def square():
    return Polygon.square()


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s[7:9])):
            terminalreporter.write_line(line)


PERIOD3 = (math.atan(1 / 3), math.pi - math.atan(2 / 3))
