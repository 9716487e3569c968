import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from conftest import random_hand_frame
from openteach.errors import DegenerateHand, Paused
from openteach.hands import make_frame
from openteach.retarget import (
    ClutchState,
    EndEffectorTarget,
    arm_retarget,
    clutch_pause,
    clutch_resume,
    set_resolution,
)
from openteach.transforms import rot_z
from openteach.wire import Timestamp

ANCHOR_EE = EndEffectorTarget(position=np.array([0.4, 0.0, 0.6]),
                              orientation=np.array([1.0, 0.0, 0.0, 0.0]))


def engaged(resolution=1.0, frame=None):
    frame = frame if frame is not None else make_frame(ts=Timestamp(0, 1))
    cs = ClutchState(paused=True, resolution=resolution)
    return clutch_resume(cs, frame, ANCHOR_EE), frame


class TestArmRetarget:
    def test_hand_at_anchor_returns_anchor_exactly(self):
        cs, frame = engaged(resolution=3.7)
        out = arm_retarget(cs, frame)
        assert np.array_equal(out.position, ANCHOR_EE.position)
        assert np.array_equal(out.orientation, ANCHOR_EE.orientation)

    def test_translation_scaled_by_resolution(self):
        cs, _ = engaged(resolution=0.5)
        moved = make_frame(ts=Timestamp(1, 1), wrist=(0.10, 0.0, 0.0))
        out = arm_retarget(cs, moved)
        assert np.allclose(out.position, ANCHOR_EE.position + [0.05, 0, 0],
                           atol=1e-15)
        assert np.allclose(out.orientation, ANCHOR_EE.orientation, atol=1e-12)

    def test_rotation_composes_onto_anchor(self):
        # quaternion composition oracle via scipy
        cs, _ = engaged()
        Rz30 = rot_z(np.deg2rad(30))
        rotated = make_frame(ts=Timestamp(1, 1), rotation=Rz30)
        out = arm_retarget(cs, rotated)
        assert np.allclose(out.position, ANCHOR_EE.position, atol=1e-12)
        expected = (Rotation.from_matrix(Rz30)
                    * Rotation.from_quat(ANCHOR_EE.orientation, scalar_first=True))
        got = Rotation.from_quat(out.orientation, scalar_first=True)
        assert (expected.inv() * got).magnitude() < 1e-10

    def test_orientation_independent_of_resolution(self):
        frame = make_frame(ts=Timestamp(1, 1), wrist=(0.2, 0.1, -0.1),
                           rotation=rot_z(0.4))
        outs = []
        for res in (0.25, 1.0, 4.0):
            cs, _ = engaged(resolution=res)
            outs.append(arm_retarget(cs, frame).orientation)
        assert np.array_equal(outs[0], outs[1])
        assert np.array_equal(outs[1], outs[2])

    def test_position_delta_linear_in_resolution(self):
        frame = make_frame(ts=Timestamp(1, 1), wrist=(0.07, -0.03, 0.11))
        cs1, _ = engaged(resolution=1.0)
        base_delta = arm_retarget(cs1, frame).position - ANCHOR_EE.position
        for res in (0.1, 0.5, 2.0, 8.0):
            cs, _ = engaged(resolution=res)
            delta = arm_retarget(cs, frame).position - ANCHOR_EE.position
            assert np.allclose(delta, res * base_delta, rtol=1e-12, atol=1e-15)

    def test_paused_raises(self):
        cs, frame = engaged()
        cs = clutch_pause(cs)
        with pytest.raises(Paused):
            arm_retarget(cs, frame)

    def test_degenerate_hand_propagates(self):
        cs, _ = engaged()
        kp = np.zeros((21, 3))
        kp[5] = (1, 0, 0)
        kp[17] = (2, 0, 0)
        from openteach.wire import Hand, HandFrame
        with pytest.raises(DegenerateHand):
            arm_retarget(cs, HandFrame(Timestamp(1, 1), Hand.RIGHT, kp))

    def test_purity_bitwise(self):
        rng = np.random.default_rng(5)
        frame = random_hand_frame(rng)
        cs, _ = engaged()
        a = arm_retarget(cs, frame)
        b = arm_retarget(cs, frame)
        assert np.array_equal(a.position, b.position)
        assert np.array_equal(a.orientation, b.orientation)


class TestClutch:
    def test_resume_reanchors_no_jump(self):
        cs, _ = engaged()
        cs = clutch_pause(cs)
        # hand wanders 0.2 m while paused
        wandered = make_frame(ts=Timestamp(2, 1), wrist=(0.2, 0.0, 0.0))
        current_ee = EndEffectorTarget(position=np.array([0.4, 0.0, 0.6]),
                                       orientation=np.array([1.0, 0.0, 0.0, 0.0]))
        cs = clutch_resume(cs, wandered, current_ee)
        out = arm_retarget(cs, wandered)
        assert np.array_equal(out.position, current_ee.position)
        assert np.array_equal(out.orientation, current_ee.orientation)

    def test_second_resume_wins(self):
        cs, _ = engaged()
        f1 = make_frame(ts=Timestamp(1, 1), wrist=(0.1, 0, 0))
        f2 = make_frame(ts=Timestamp(2, 1), wrist=(0.3, 0, 0))
        ee2 = EndEffectorTarget(position=np.array([1.0, 1.0, 1.0]),
                                orientation=np.array([1.0, 0.0, 0.0, 0.0]))
        cs = clutch_resume(cs, f1, ANCHOR_EE)
        cs = clutch_resume(cs, f2, ee2)
        assert np.array_equal(arm_retarget(cs, f2).position, ee2.position)

    def test_clutch_invariance_random_motion(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            cs, _ = engaged(resolution=float(rng.uniform(0.1, 5.0)))
            cs = clutch_pause(cs)
            resume_frame = random_hand_frame(rng)
            ee = EndEffectorTarget(position=rng.uniform(-1, 1, 3),
                                   orientation=np.array([1.0, 0.0, 0.0, 0.0]))
            cs = clutch_resume(cs, resume_frame, ee)
            out = arm_retarget(cs, resume_frame)
            assert np.array_equal(out.position, ee.position)
            assert np.array_equal(out.orientation, ee.orientation)

    def test_set_resolution_validates(self):
        cs, frame = engaged()
        with pytest.raises(ValueError):
            set_resolution(cs, 0.0)
        with pytest.raises(ValueError):
            set_resolution(cs, 11.0)

    def test_set_resolution_reanchors_without_teleport(self):
        cs, _ = engaged(resolution=1.0)
        moved = make_frame(ts=Timestamp(1, 1), wrist=(0.10, 0.0, 0.0))
        before = arm_retarget(cs, moved)
        cs2 = set_resolution(cs, 0.5, frame=moved, ee_pose=before)
        # right after the change, the same hand pose maps to the same target
        assert np.array_equal(arm_retarget(cs2, moved).position, before.position)
        # and further motion responds at half scale
        moved2 = make_frame(ts=Timestamp(2, 1), wrist=(0.20, 0.0, 0.0))
        out = arm_retarget(cs2, moved2)
        assert np.allclose(out.position - before.position, [0.05, 0, 0], atol=1e-12)
