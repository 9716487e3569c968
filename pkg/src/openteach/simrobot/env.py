"""Simulated robot environments.

Each environment owns a joint-level state, a simulated clock, and a gripper.
Stepping is deterministic: the same state and command sequence replays to
bit-identical trajectories, which the open-loop demo replay tests rely on.
Arm and hand environments run a 300 Hz PD inner loop under each step (the
latest target is held between commands); kinematic mode snaps joints to the
IK solution instead, for latency benchmarking.
"""

import numpy as np

from ..errors import KindMismatch
from ..transforms import quat_identity
from ..wire.messages import CommandKind, RobotState, Timestamp
from .dynamics import JointState, PdGains, pd_step
from .ik import ik_dls
from .kinematics import fk_pose
from . import models

INNER_HZ = 300
_WALL_BASE_US = 1_000_000_000  # fixed wall epoch keeps replays byte-identical


class _SimClock:
    def __init__(self):
        self.sim_ns = 0

    def advance(self, dt):
        self.sim_ns += int(round(dt * 1e9))

    def now(self):
        return Timestamp(self.sim_ns, _WALL_BASE_US + self.sim_ns // 1000)


class _GripperMixin:
    def _init_gripper(self):
        self.gripper_closed = False
        self._gripper_flip_at = None  # sim ns deadline of a pending toggle

    def _command_gripper_toggle(self):
        if self._gripper_flip_at is None:
            delay_ns = int(models.GRIPPER_ACTUATION_DELAY * 1e9)
            self._gripper_flip_at = self.clock.sim_ns + delay_ns

    def _settle_gripper(self):
        if self._gripper_flip_at is not None and self.clock.sim_ns >= self._gripper_flip_at:
            self.gripper_closed = not self.gripper_closed
            self._gripper_flip_at = None


class ArmEnv(_GripperMixin):
    """7-DOF arm driven by end-effector targets."""

    ACCEPTS = (CommandKind.ARM_TARGET, CommandKind.GRIPPER_TOGGLE)

    def __init__(self, model=None, gains=None, kinematic=False,
                 home_q=None, ik_damping=0.05, ik_max_iter=300):
        self.model = model or models.arm7()
        n = self.model.njoints
        self.gains = gains or PdGains.critically_damped(100.0, n)
        self.kinematic = kinematic
        self.home_q = np.asarray(
            home_q if home_q is not None else models.ARM_HOME_Q, dtype=float)[:n]
        self.ik_damping = ik_damping
        self.ik_max_iter = ik_max_iter
        self.reset()

    def reset(self):
        self.clock = _SimClock()
        self.js = JointState(self.home_q.copy(), np.zeros(self.model.njoints),
                             self.clock.now())
        self.q_target = self.home_q.copy()
        self._init_gripper()
        self.last_src_seq = -1
        return self.state()

    def home_pose(self):
        return fk_pose(self.model, self.home_q)

    def apply(self, cmd):
        if cmd.kind not in self.ACCEPTS:
            raise KindMismatch(f"arm env got {cmd.kind.name}")
        self.last_src_seq = cmd.src_seq
        if cmd.kind == CommandKind.GRIPPER_TOGGLE:
            self._command_gripper_toggle()
        else:
            # IK failure leaves the previous target (and state) intact.
            self.q_target = ik_dls(
                self.model, cmd.position, cmd.orientation, seed=self.js.q,
                damping=self.ik_damping, max_iter=self.ik_max_iter)

    def step(self, cmd, dt):
        if cmd is not None:
            self.apply(cmd)
        self.advance(dt)
        return self.state()

    def advance(self, dt):
        if self.kinematic:
            self.js = JointState(self.model.clamp(self.q_target),
                                 np.zeros(self.model.njoints), self.js.ts)
            self.clock.advance(dt)
        else:
            n_sub = max(1, round(dt * INNER_HZ))
            dt_sub = dt / n_sub
            limits = (self.model.lower, self.model.upper)
            for _ in range(n_sub):
                self.js = pd_step(self.js, self.q_target, self.gains, dt_sub, limits)
            self.clock.advance(dt)
        self._settle_gripper()

    def state(self):
        pos, quat = fk_pose(self.model, self.js.q)
        return RobotState(
            ts=self.clock.now(), q=self.js.q.copy(), qd=self.js.qd.copy(),
            ee_position=pos, ee_orientation=quat,
            gripper_closed=self.gripper_closed, src_seq=self.last_src_seq,
        )


class HandEnv:
    """16-DOF hand driven by joint targets; reports the thumb tip as ee."""

    ACCEPTS = (CommandKind.HAND_JOINTS,)

    def __init__(self, gains=None, kinematic=False):
        self.lower, self.upper = models.hand16_limits()
        n = len(self.lower)
        self.gains = gains or PdGains.critically_damped(100.0, n)
        self.kinematic = kinematic
        self.thumb = models.thumb_chain()
        self.reset()

    def reset(self):
        self.clock = _SimClock()
        n = len(self.lower)
        self.js = JointState(np.zeros(n), np.zeros(n), self.clock.now())
        self.q_target = np.zeros(n)
        self.last_src_seq = -1
        return self.state()

    def apply(self, cmd):
        if cmd.kind not in self.ACCEPTS:
            raise KindMismatch(f"hand env got {cmd.kind.name}")
        if len(cmd.joints) != len(self.lower):
            raise KindMismatch(f"expected {len(self.lower)} joints, got {len(cmd.joints)}")
        self.last_src_seq = cmd.src_seq
        self.q_target = np.clip(cmd.joints, self.lower, self.upper)

    def step(self, cmd, dt):
        if cmd is not None:
            self.apply(cmd)
        self.advance(dt)
        return self.state()

    def advance(self, dt):
        if self.kinematic:
            self.js = JointState(self.q_target.copy(), np.zeros(len(self.lower)), self.js.ts)
            self.clock.advance(dt)
        else:
            n_sub = max(1, round(dt * INNER_HZ))
            dt_sub = dt / n_sub
            for _ in range(n_sub):
                self.js = pd_step(self.js, self.q_target, self.gains, dt_sub,
                                  (self.lower, self.upper))
            self.clock.advance(dt)

    def state(self):
        pos, quat = fk_pose(self.thumb, self.js.q[:4])
        return RobotState(
            ts=self.clock.now(), q=self.js.q.copy(), qd=self.js.qd.copy(),
            ee_position=pos, ee_orientation=quat, src_seq=self.last_src_seq,
        )


class MobileEnv(_GripperMixin):
    """Mobile base with lift and extension actuators and a wrist."""

    ACCEPTS = (CommandKind.MOBILE_TARGET, CommandKind.GRIPPER_TOGGLE)

    def __init__(self, lift_range=models.MOBILE_LIFT_RANGE,
                 extension_range=models.MOBILE_EXTENSION_RANGE,
                 rate_limit=models.MOBILE_RATE_LIMIT):
        self.lift_range = lift_range
        self.extension_range = extension_range
        self.rate_limit = rate_limit
        self.reset()

    def reset(self):
        self.clock = _SimClock()
        self.base_x = 0.0
        self.lift = self.lift_range[0]
        self.extension = self.extension_range[0]
        self.wrist = quat_identity()
        self.base_velocity = 0.0
        self.lift_target = self.lift
        self.extension_target = self.extension
        self._init_gripper()
        self.last_src_seq = -1
        return self.state()

    def apply(self, cmd):
        if cmd.kind not in self.ACCEPTS:
            raise KindMismatch(f"mobile env got {cmd.kind.name}")
        self.last_src_seq = cmd.src_seq
        if cmd.kind == CommandKind.GRIPPER_TOGGLE:
            self._command_gripper_toggle()
        else:
            self.base_velocity = cmd.base_lateral_velocity
            self.lift_target = float(np.clip(cmd.lift_height, *self.lift_range))
            self.extension_target = float(np.clip(cmd.arm_extension, *self.extension_range))
            self.wrist = np.asarray(cmd.wrist_orientation, dtype=float)
            if cmd.gripper_toggle:
                self._command_gripper_toggle()

    def step(self, cmd, dt):
        if cmd is not None:
            self.apply(cmd)
        self.advance(dt)
        return self.state()

    def advance(self, dt):
        self.base_x += self.base_velocity * dt
        max_move = self.rate_limit * dt
        self.lift += float(np.clip(self.lift_target - self.lift, -max_move, max_move))
        self.extension += float(np.clip(self.extension_target - self.extension,
                                        -max_move, max_move))
        self.clock.advance(dt)
        self._settle_gripper()

    def state(self):
        return RobotState(
            ts=self.clock.now(),
            q=np.array([self.lift, self.extension]),
            qd=np.array([0.0, 0.0]),
            ee_position=np.array([self.base_x, self.extension, self.lift]),
            ee_orientation=self.wrist.copy(),
            gripper_closed=self.gripper_closed,
            base_pose=np.array([self.base_x, 0.0, 0.0]),
            lift_height=self.lift,
            arm_extension=self.extension,
            src_seq=self.last_src_seq,
        )


def step_env(env, cmd, dt):
    """Step any environment, checking the command kind against the env."""
    if cmd is not None and cmd.kind not in env.ACCEPTS:
        raise KindMismatch(f"{type(env).__name__} does not accept {cmd.kind.name}")
    return env.step(cmd, dt)
