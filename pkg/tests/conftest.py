import numpy as np
import pytest

from openteach.hands import make_frame
from openteach.wire.messages import Hand, HandFrame, Timestamp


def pytest_runtest_logreport(report):
    # One visible pass/fail line per acceptance criterion.
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        status = "PASS" if report.passed else "FAIL"
        print(f"\n[ACCEPTANCE] {status} {name}")


@pytest.fixture
def ts0():
    return Timestamp(0, 1)


@pytest.fixture
def neutral_frame(ts0):
    return make_frame(ts=ts0)


def random_hand_frame(rng, ts=None):
    """A random, non-degenerate hand: the template under a random rigid
    transform with random curls."""
    from openteach.transforms import rot_axis_angle

    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    R = rot_axis_angle(axis, rng.uniform(-np.pi, np.pi))
    wrist = rng.uniform(-0.5, 0.5, 3)
    curls = rng.uniform(0.0, 1.0, 5)
    return make_frame(ts=ts or Timestamp(1, 1), wrist=wrist, rotation=R, curls=curls)
