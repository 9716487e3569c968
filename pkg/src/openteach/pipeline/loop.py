"""The teleoperation loop: hand frames in, robot commands and states out.

Per tick: drain control events in arrival order, take the freshest hand
frame (conflated), retarget it to a robot command under the current clutch
and pinch state, step the environment, publish the command and the
resulting state. Real-time runs schedule ticks on a rate limiter;
lockstep runs consume a scripted frame per tick with synthetic clocks and
are bit-for-bit reproducible.
"""

import logging
import threading
from dataclasses import dataclass, field

from ..errors import NoConvergence, Paused
from ..retarget import (
    ClutchState,
    EndEffectorTarget,
    HandRetargetConfig,
    MobileAnchor,
    MobileRetargetConfig,
    PinchConfig,
    PinchState,
    arm_retarget,
    clutch_pause,
    clutch_resume,
    finger_joint_angles,
    mobile_retarget,
    pinch_detect,
    set_resolution,
)
from ..wire.messages import (
    CommandKind,
    ControlEventKind,
    Envelope,
    RobotCommand,
    Timestamp,
    TopicPolicy,
)
from .rate import RateLimiter
from .source import script_frame, script_timestamp

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LoopTopics:
    hand: str = "hand/frames"
    command: str = "robot/cmd"
    state: str = "robot/state"
    control: str = "control"
    stats: str = "stats"


@dataclass
class LoopConfig:
    robot: str = "arm"                # arm | hand | mobile
    rate_hz: float = 90.0
    resolution: float = 1.0
    auto_engage: bool = True          # anchor on the first usable frame
    stale_after_s: float = 1.0
    headset_to_base: object = None    # 3x3 rotation or None
    pinch: PinchConfig = field(default_factory=PinchConfig)
    hand_cfg: HandRetargetConfig = field(default_factory=HandRetargetConfig)
    mobile_cfg: MobileRetargetConfig = field(default_factory=MobileRetargetConfig)
    topics: LoopTopics = field(default_factory=LoopTopics)


class TeleopLoop:
    def __init__(self, bus, env, cfg):
        self.bus = bus
        self.env = env
        self.cfg = cfg
        self.clutch = ClutchState(paused=True, resolution=cfg.resolution)
        self.pinch = PinchState()
        self.ticks = 0
        self.stale_ticks = 0
        self.commands_sent = 0
        self.limiter = None
        self._last_frame_env = None
        self._last_cmd = None
        self._thumb_seed = None
        self._pending_resume = cfg.auto_engage

    # -- control events ----------------------------------------------------

    def _apply_control(self, ev):
        kind = ev.kind
        if kind == ControlEventKind.PAUSE:
            self.clutch = clutch_pause(self.clutch)
        elif kind == ControlEventKind.RESUME:
            # Anchor on the next fresh frame, not a stale pre-pause one:
            # the operator may have repositioned while paused and a stale
            # anchor would make the first fresh frame jump the robot.
            self._pending_resume = True
        elif kind == ControlEventKind.RESET_ANCHOR:
            if not self.clutch.paused:
                self._try_engage()
        elif kind == ControlEventKind.SET_RESOLUTION:
            frame = self._last_frame_env.payload if self._last_frame_env else None
            self.clutch = set_resolution(
                self.clutch, ev.value, frame=frame,
                ee_pose=self._current_ee(), mobile_anchor=self._current_mobile())

    def _try_engage(self):
        """Anchor the clutch at the current hand pose and robot pose."""
        if self._last_frame_env is None:
            return False
        self.clutch = clutch_resume(
            self.clutch, self._last_frame_env.payload,
            self._current_ee(), self._current_mobile())
        return True

    def _current_ee(self):
        st = self.env.state()
        return EndEffectorTarget(position=st.ee_position,
                                 orientation=st.ee_orientation)

    def _current_mobile(self):
        if self.cfg.robot != "mobile":
            return None
        st = self.env.state()
        return MobileAnchor(lift_height=st.lift_height,
                            arm_extension=st.arm_extension,
                            wrist_orientation=st.ee_orientation)

    # -- per-tick retargeting ----------------------------------------------

    def _operate(self, frame_env, now_ts):
        """Turn the latest hand frame into robot commands (possibly [])."""
        frame = frame_env.payload
        seq = frame_env.seq
        cmds = []
        if self.cfg.robot == "arm":
            target = arm_retarget(self.clutch, frame, self.cfg.headset_to_base)
            cmds.append(RobotCommand(
                CommandKind.ARM_TARGET, now_ts, src_seq=seq,
                position=target.position, orientation=target.orientation))
            self.pinch, event = pinch_detect(self.pinch, frame, self.cfg.pinch)
            if event is not None:
                cmds.append(RobotCommand(CommandKind.GRIPPER_TOGGLE, now_ts, src_seq=seq))
        elif self.cfg.robot == "hand":
            target = finger_joint_angles(frame, self.cfg.hand_cfg,
                                         thumb_seed=self._thumb_seed)
            self._thumb_seed = target.angles[0:4]
            cmds.append(RobotCommand(
                CommandKind.HAND_JOINTS, now_ts, src_seq=seq, joints=target.angles))
        elif self.cfg.robot == "mobile":
            target, self.pinch = mobile_retarget(
                self.clutch, frame, self.pinch, self.cfg.mobile_cfg)
            cmds.append(RobotCommand(
                CommandKind.MOBILE_TARGET, now_ts, src_seq=seq,
                base_lateral_velocity=target.base_lateral_velocity,
                lift_height=target.lift_height,
                arm_extension=target.arm_extension,
                wrist_orientation=target.wrist_orientation,
                gripper_toggle=target.gripper_toggle))
        else:
            raise ValueError(f"unknown robot kind {self.cfg.robot!r}")
        return cmds

    def _tick(self, frame_env, dt, now_ts, env_ts=None):
        if frame_env is not None:
            self._last_frame_env = frame_env
            if self._pending_resume:
                if self._try_engage():
                    self._pending_resume = False

        fresh = frame_env is not None
        stale = (self._last_frame_env is None
                 or (not fresh and self._frame_age_s(now_ts) > self.cfg.stale_after_s))
        if stale:
            self.stale_ticks += 1

        cmds = []
        if self._last_frame_env is not None and not stale:
            try:
                # hand robots track every frame; arm and mobile need the clutch
                if self.cfg.robot == "hand" or not self.clutch.paused:
                    cmds = self._operate(self._last_frame_env, now_ts)
                elif self._last_cmd is not None:
                    cmds = [self._last_cmd]  # paused: stream freezes at last value
            except Paused:
                cmds = [self._last_cmd] if self._last_cmd is not None else []
        elif self._last_cmd is not None:
            cmds = [self._last_cmd]  # stale input: hold the last command

        for cmd in cmds:
            try:
                self.env.apply(cmd)
            except NoConvergence as e:
                log.warning("IK did not converge (residual %.3g); holding last target",
                            e.residual)
                continue
            self.bus.publish(self.cfg.topics.command, cmd, ts=env_ts)
            self.commands_sent += 1
            if cmd.kind not in (CommandKind.GRIPPER_TOGGLE,):
                self._last_cmd = cmd

        self.env.advance(dt)
        state = self.env.state()
        self.bus.publish(self.cfg.topics.state, state, ts=env_ts)
        self.ticks += 1
        return state

    def _frame_age_s(self, now_ts):
        return (now_ts.mono_ns - self._last_frame_env.ts.mono_ns) * 1e-9

    # -- run modes -----------------------------------------------------------

    def run(self, duration_s=None, max_ticks=None, stop_event=None):
        """Real-time loop at cfg.rate_hz until stopped."""
        stop_event = stop_event or threading.Event()
        hand_sub = self.bus.subscribe(self.cfg.topics.hand, TopicPolicy.conflate())
        ctrl_sub = self.bus.subscribe(self.cfg.topics.control, TopicPolicy.queue(256))
        self.limiter = RateLimiter(self.cfg.rate_hz)
        dt = self.limiter.period
        try:
            while not stop_event.is_set():
                if duration_s is not None and self.limiter.elapsed >= duration_s \
                        and self.ticks > 0:
                    break
                if max_ticks is not None and self.ticks >= max_ticks:
                    break
                self.limiter.wait()
                for ev_env in ctrl_sub.drain():
                    self._apply_control(ev_env.payload)
                frame_env = hand_sub.poll()
                if frame_env is None:
                    # No fresh frame yet this period: a co-rated source's
                    # next publish lands within half a period whatever the
                    # phase offset, so waiting here keeps latency at
                    # processing cost instead of a full period.
                    frame_env = hand_sub.recv(timeout=0.5 * dt)
                self._tick(frame_env, dt, Timestamp.now())
        finally:
            self.bus.unsubscribe(hand_sub)
            self.bus.unsubscribe(ctrl_sub)
        return self

    def run_lockstep(self, script, ticks, control_schedule=None):
        """Deterministic run: one scripted frame per tick, synthetic clocks.

        control_schedule: list of (tick index, ControlEvent), applied before
        that tick's frame. Frames are published on the hand topic so taps
        (recorder, probes) see the same traffic as a real-time run.
        """
        schedule = {}
        for tick, ev in (control_schedule or []):
            schedule.setdefault(tick, []).append(ev)
        hz = self.cfg.rate_hz
        dt = 1.0 / hz
        for k in range(ticks):
            ts = script_timestamp(k, hz)
            for ev in schedule.get(k, []):
                self._apply_control(ev)
            frame = script_frame(script, k, hz)
            seq = self.bus.publish(self.cfg.topics.hand, frame, ts=ts)
            frame_env = Envelope(self.cfg.topics.hand, seq, ts, frame)
            self._tick(frame_env, dt, ts, env_ts=ts)
        return self
