import numpy as np
import pytest

from noiselab.image_core import GrayImage
from noiselab.synthetic import synthetic_eye


@pytest.fixture(scope="session")
def eye():
    return synthetic_eye()


@pytest.fixture
def rng():
    # test-side randomness only; library noise uses its own stream
    return np.random.default_rng(1234)


def random_image(rng, h=16, w=16):
    return GrayImage(rng.integers(0, 256, size=(h, w), dtype=np.uint8))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
