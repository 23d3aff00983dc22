import numpy as np
import pytest

from capwave.spectral_ops import make_grid, random_band_limited


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid256():
    return make_grid(256)


@pytest.fixture
def band_field(rng):
    def make(grid, kmax=None, real=True):
        return random_band_limited(grid, kmax or grid.N // 4, rng, real=real)
    return make


def relerr(a, b):
    a = getattr(a, "values", a)
    b = getattr(b, "values", b)
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))) / scale)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
