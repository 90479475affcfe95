import numpy as np
import pytest

from sf2d import Field2D


def checkerboard(n=8, pixel_size=1.0):
    y, x = np.mgrid[0:n, 0:n]
    return Field2D(np.where((x + y) % 2 == 0, 1.0, -1.0), pixel_size)


def random_masked_field(seed, n=64, masked=0.1, low=-10.0, high=10.0):
    rng = np.random.default_rng(seed)
    values = rng.uniform(low, high, (n, n))
    mask = rng.random((n, n)) >= masked
    return Field2D(values, 1.0, mask)


@pytest.fixture
def rng():
    return np.random.default_rng(20240615)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
