import numpy as np
import pytest

from noisyzd import ExpectedPayoffs, NoiseModel, StagePayoffs

_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(criterion, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES.append(f"[{status}] criterion {criterion}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def equal_gains():
    return StagePayoffs(G=0.5, L=0.5)


@pytest.fixture
def high_temptation():
    return StagePayoffs(G=1.0, L=0.5)


@pytest.fixture
def classic():
    return ExpectedPayoffs(3.0, 0.0, 5.0, 1.0)


@pytest.fixture
def noise_free():
    return NoiseModel.noise_free()


def random_noise(rng, max_strength=0.15):
    s = rng.uniform(0.0, max_strength)
    share = rng.uniform(0.5, 1.0)
    return NoiseModel.from_pair(share * s, (1 - share) * s)


def random_interior(rng, low=0.02, high=0.98):
    return tuple(rng.uniform(low, high, 4))
