import numpy as np
import pytest

from openteach.errors import DimensionMismatch
from openteach.simrobot import (
    Joint,
    KinematicModel,
    fk,
    fk_position,
    jacobian,
    models,
    transform,
)

Z = np.array([0.0, 0.0, 1.0])


def single_joint_model():
    return KinematicModel(joints=(Joint(axis=Z, link=transform()),),
                          tool=transform(translation=(1.0, 0.0, 0.0)))


def planar_two_link():
    return KinematicModel(
        joints=(Joint(axis=Z, link=transform()),
                Joint(axis=Z, link=transform(translation=(1.0, 0.0, 0.0)))),
        tool=transform(translation=(1.0, 0.0, 0.0)))


class TestFk:
    def test_quarter_turn(self):
        p = fk_position(single_joint_model(), [np.pi / 2])
        assert np.allclose(p, [0.0, 1.0, 0.0], atol=1e-12)

    def test_planar_two_link(self):
        p = fk_position(planar_two_link(), [0.0, np.pi / 2])
        assert np.allclose(p, [1.0, 1.0, 0.0], atol=1e-12)

    def test_arm7_home_matches_chained_product_oracle(self):
        # independent oracle: multiply the 8 constant transforms by hand
        arm = models.arm7()
        T = np.eye(4)
        for joint in arm.joints:
            T = T @ joint.link  # q = 0: rotations are identity
        T = T @ arm.tool
        assert np.allclose(fk(arm, np.zeros(7)), T, atol=1e-15)
        assert np.allclose(T[:3, 3], [0.0, 0.0, 7 * 0.3], atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            fk(planar_two_link(), [0.0])


class TestJacobian:
    def test_matches_finite_differences(self):
        arm = models.arm7()
        rng = np.random.default_rng(2)
        q = rng.uniform(arm.lower * 0.5, arm.upper * 0.5)
        J = jacobian(arm, q)
        eps = 1e-7
        for i in range(7):
            dq = np.zeros(7)
            dq[i] = eps
            dp = (fk_position(arm, q + dq) - fk_position(arm, q - dq)) / (2 * eps)
            assert np.allclose(J[:3, i], dp, atol=1e-6)

    def test_reach_bound(self):
        arm = models.arm7()
        assert np.isclose(arm.reach(), 2.1, atol=1e-12)
        rng = np.random.default_rng(3)
        for _ in range(50):
            q = rng.uniform(arm.lower, arm.upper)
            assert np.linalg.norm(fk_position(arm, q)) <= arm.reach() + 1e-9
