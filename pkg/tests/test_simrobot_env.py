import numpy as np
import pytest

from openteach.errors import KindMismatch
from openteach.simrobot import ArmEnv, HandEnv, MobileEnv, fk_pose, models, step_env
from openteach.wire import CommandKind, RobotCommand, Timestamp

TS = Timestamp(1, 1)


def arm_target(position, orientation, src_seq=0):
    return RobotCommand(CommandKind.ARM_TARGET, TS, src_seq,
                        position=position, orientation=orientation)


class TestArmEnv:
    def test_kinematic_reaches_target_within_ik_tol(self):
        env = ArmEnv(kinematic=True)
        pos, quat = env.home_pose()
        target = pos + np.array([0.05, -0.03, 0.02])
        state = step_env(env, arm_target(target, quat), 1 / 90)
        assert np.linalg.norm(state.ee_position - target) < 1e-6

    def test_published_ee_is_fk_consistent(self):
        env = ArmEnv(kinematic=False)
        pos, quat = env.home_pose()
        state = step_env(env, arm_target(pos + [0.02, 0, 0], quat), 1 / 90)
        fk_pos, fk_quat = fk_pose(env.model, state.q)
        assert np.array_equal(state.ee_position, fk_pos)
        assert np.array_equal(state.ee_orientation, fk_quat)

    def test_gripper_toggle_after_actuation_delay(self):
        env = ArmEnv(kinematic=True)
        state = env.step(RobotCommand(CommandKind.GRIPPER_TOGGLE, TS), 0.05)
        assert state.gripper_closed is False  # 50 ms < 100 ms delay
        state = env.step(None, 0.06)
        assert state.gripper_closed is True

    def test_dynamics_converges_to_held_target(self):
        env = ArmEnv(kinematic=False)
        pos, quat = env.home_pose()
        target = pos + np.array([0.05, 0.0, 0.0])
        env.step(arm_target(target, quat), 1 / 90)
        for _ in range(180):  # hold 2 s
            state = env.step(None, 1 / 90)
        assert np.linalg.norm(state.ee_position - target) < 1e-3

    def test_joint_limits_never_violated(self):
        env = ArmEnv(kinematic=False)
        pos, quat = env.home_pose()
        far = pos + np.array([0.0, 0.0, 5.0])  # unreachable high target
        try:
            env.step(arm_target(far, quat), 1 / 90)
        except Exception:
            pass
        for _ in range(90):
            state = env.step(None, 1 / 90)
            assert np.all(state.q >= env.model.lower - 1e-12)
            assert np.all(state.q <= env.model.upper + 1e-12)

    def test_determinism_bit_identical(self):
        runs = []
        for _ in range(2):
            env = ArmEnv(kinematic=False)
            pos, quat = env.home_pose()
            states = []
            for k in range(60):
                cmd = arm_target(pos + [0.001 * k, 0, 0], quat, src_seq=k)
                states.append(env.step(cmd, 1 / 90))
            runs.append(states)
        assert runs[0] == runs[1]

    def test_kind_mismatch(self):
        env = ArmEnv(kinematic=True)
        bad = RobotCommand(CommandKind.HAND_JOINTS, TS, joints=np.zeros(16))
        with pytest.raises(KindMismatch):
            step_env(env, bad, 1 / 90)


class TestHandEnv:
    def test_tracks_joint_targets(self):
        env = HandEnv()
        target = np.clip(np.full(16, 0.4), *models.hand16_limits())
        cmd = RobotCommand(CommandKind.HAND_JOINTS, TS, joints=target)
        for _ in range(120):
            state = env.step(cmd, 1 / 60)
        assert np.max(np.abs(state.q - target)) < 1e-3

    def test_wrong_joint_count_rejected(self):
        env = HandEnv()
        with pytest.raises(KindMismatch):
            env.step(RobotCommand(CommandKind.HAND_JOINTS, TS, joints=np.zeros(7)), 1 / 60)


class TestMobileEnv:
    def mobile_cmd(self, v=0.0, lift=0.0, ext=0.0, toggle=False):
        return RobotCommand(CommandKind.MOBILE_TARGET, TS,
                            base_lateral_velocity=v, lift_height=lift,
                            arm_extension=ext,
                            wrist_orientation=np.array([1.0, 0, 0, 0]),
                            gripper_toggle=toggle)

    def test_constant_velocity_exact_integration(self):
        env = MobileEnv()
        env.apply(self.mobile_cmd(v=0.1))
        for _ in range(600):
            env.advance(2.0 / 600.0)
        assert abs(env.state().base_pose[0] - 0.2) < 1e-9

    def test_lift_rate_limited(self):
        env = MobileEnv()
        state = env.step(self.mobile_cmd(lift=1.0), 0.1)
        assert np.isclose(state.lift_height, models.MOBILE_RATE_LIMIT * 0.1)

    def test_extension_clamped_to_range(self):
        env = MobileEnv()
        for _ in range(100):
            state = env.step(self.mobile_cmd(ext=5.0), 0.1)
        assert state.arm_extension == models.MOBILE_EXTENSION_RANGE[1]

    def test_gripper_toggle_embedded(self):
        env = MobileEnv()
        env.step(self.mobile_cmd(toggle=True), 0.05)
        state = env.step(self.mobile_cmd(), 0.06)
        assert state.gripper_closed is True
