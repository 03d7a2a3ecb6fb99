import math

import numpy as np
import pytest

from birdseye.synthetic import CameraModel, ground_truth

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def example_camera():
    """f=500, 1000x1000, tilt 30 deg, level, 5 m above the ground."""
    return CameraModel(f=500.0, width=1000, height=1000, tilt=math.radians(30), cam_height=5.0)


@pytest.fixture
def example_record(example_camera):
    return ground_truth(example_camera)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
