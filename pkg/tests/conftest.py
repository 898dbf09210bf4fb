import numpy as np
import pytest

from fractal_horizon import rng
from fractal_horizon.sampling import SampledCurve, SampledSurface

# filled by test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}

DYADIC_BITS = 20


def dyadic_values(seed, shape):
    """Multiples of 2**-20 in [-1, 1]: sums, differences and j/16 multiples stay exact."""
    u = rng.uniform(seed, int(np.prod(shape))).reshape(shape)
    return np.round((2.0 * u - 1.0) * 2**DYADIC_BITS) * 2.0**-DYADIC_BITS


def dyadic_curve(seed, n):
    return SampledCurve(n, dyadic_values(seed, (2**n + 1,)))


def dyadic_surface(seed, n):
    side = 2**n + 1
    return SampledSurface(n, dyadic_values(seed, (side, side)))


@pytest.fixture
def curve_factory():
    return dyadic_curve


@pytest.fixture
def surface_factory():
    return dyadic_surface


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
