import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20241015)


def monte_carlo_area(cset, rng, n=100_000):
    x0, x1, y0, y1 = cset.bbox()
    z = rng.uniform(x0, x1, n) + 1j * rng.uniform(y0, y1, n)
    return (x1 - x0) * (y1 - y0) * np.count_nonzero(cset.contains(z)) / n


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
