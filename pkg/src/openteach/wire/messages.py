"""Message schemas carried on the bus.

Keypoint layout for hand frames: index 0 is the wrist, then four points per
finger in thumb, index, middle, ring, pinky order, each finger knuckle to
tip. Coordinates are meters in a fixed right-handed, z-up headset frame.
Quaternions are (w, x, y, z), unit norm. Units are meters, radians, seconds
everywhere on the wire.
"""

import time
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

NUM_KEYPOINTS = 21
WRIST = 0
FINGERS = ("thumb", "index", "middle", "ring", "pinky")

_PROCESS_EPOCH_NS = time.monotonic_ns()


def knuckle_index(finger):
    return 1 + 4 * FINGERS.index(finger)


def tip_index(finger):
    return 4 + 4 * FINGERS.index(finger)


@dataclass(frozen=True)
class Timestamp:
    """A sample time: monotonic ns since process start plus wall-clock us."""

    mono_ns: int
    wall_us: int

    def __post_init__(self):
        if self.wall_us <= 0:
            raise ValueError("wall_us must be > 0")

    @classmethod
    def now(cls):
        return cls(
            mono_ns=time.monotonic_ns() - _PROCESS_EPOCH_NS,
            wall_us=time.time_ns() // 1000,
        )

    def mono_s(self):
        return self.mono_ns * 1e-9


class Hand(IntEnum):
    LEFT = 0
    RIGHT = 1


@dataclass(eq=False)
class HandFrame:
    ts: Timestamp
    hand: Hand
    keypoints: np.ndarray  # (21, 3) float64, meters
    confidence: float = 1.0

    def __post_init__(self):
        kp = np.ascontiguousarray(np.asarray(self.keypoints, dtype=np.float64))
        if kp.shape != (NUM_KEYPOINTS, 3):
            raise ValueError(f"keypoints must be (21, 3), got {kp.shape}")
        if not np.all(np.isfinite(kp)):
            raise ValueError("keypoints must be finite")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be in [0, 1]")
        self.keypoints = kp

    @property
    def wrist(self):
        return self.keypoints[WRIST]

    def knuckle(self, finger):
        return self.keypoints[knuckle_index(finger)]

    def tip(self, finger):
        return self.keypoints[tip_index(finger)]

    def __eq__(self, other):
        return (
            isinstance(other, HandFrame)
            and self.ts == other.ts
            and self.hand == other.hand
            and np.array_equal(self.keypoints, other.keypoints)
            and self.confidence == other.confidence
        )


class CommandKind(IntEnum):
    ARM_TARGET = 0
    HAND_JOINTS = 1
    MOBILE_TARGET = 2
    GRIPPER_TOGGLE = 3


@dataclass(eq=False)
class RobotCommand:
    """A retargeted robot-side target.

    Exactly one group of fields is meaningful, selected by ``kind``.
    ``src_seq`` echoes the bus seq of the hand frame that produced the
    command (-1 when none), which is what end-to-end latency is measured by.
    """

    kind: CommandKind
    ts: Timestamp
    src_seq: int = -1
    # ARM_TARGET
    position: np.ndarray | None = None      # (3,)
    orientation: np.ndarray | None = None   # (4,) quat wxyz
    # HAND_JOINTS
    joints: np.ndarray | None = None        # (n,)
    # MOBILE_TARGET
    base_lateral_velocity: float = 0.0
    lift_height: float = 0.0
    arm_extension: float = 0.0
    wrist_orientation: np.ndarray | None = None  # (4,)
    gripper_toggle: bool = False

    def __post_init__(self):
        for name in ("position", "orientation", "joints", "wrist_orientation"):
            v = getattr(self, name)
            if v is not None:
                setattr(self, name, np.ascontiguousarray(np.asarray(v, dtype=np.float64)))

    def __eq__(self, other):
        if not isinstance(other, RobotCommand):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.ts == other.ts
            and self.src_seq == other.src_seq
            and _opt_eq(self.position, other.position)
            and _opt_eq(self.orientation, other.orientation)
            and _opt_eq(self.joints, other.joints)
            and self.base_lateral_velocity == other.base_lateral_velocity
            and self.lift_height == other.lift_height
            and self.arm_extension == other.arm_extension
            and _opt_eq(self.wrist_orientation, other.wrist_orientation)
            and self.gripper_toggle == other.gripper_toggle
        )


@dataclass(eq=False)
class RobotState:
    """The simulated robot's observed state, published after every step."""

    ts: Timestamp
    q: np.ndarray
    qd: np.ndarray
    ee_position: np.ndarray      # (3,)
    ee_orientation: np.ndarray   # (4,) quat wxyz
    gripper_closed: bool = False
    base_pose: np.ndarray = field(default_factory=lambda: np.zeros(3))  # (x, y, theta)
    lift_height: float = 0.0
    arm_extension: float = 0.0
    src_seq: int = -1

    def __post_init__(self):
        self.q = np.ascontiguousarray(np.asarray(self.q, dtype=np.float64))
        self.qd = np.ascontiguousarray(np.asarray(self.qd, dtype=np.float64))
        self.ee_position = np.ascontiguousarray(np.asarray(self.ee_position, dtype=np.float64))
        self.ee_orientation = np.ascontiguousarray(np.asarray(self.ee_orientation, dtype=np.float64))
        self.base_pose = np.ascontiguousarray(np.asarray(self.base_pose, dtype=np.float64))

    def __eq__(self, other):
        if not isinstance(other, RobotState):
            return NotImplemented
        return (
            self.ts == other.ts
            and np.array_equal(self.q, other.q)
            and np.array_equal(self.qd, other.qd)
            and np.array_equal(self.ee_position, other.ee_position)
            and np.array_equal(self.ee_orientation, other.ee_orientation)
            and self.gripper_closed == other.gripper_closed
            and np.array_equal(self.base_pose, other.base_pose)
            and self.lift_height == other.lift_height
            and self.arm_extension == other.arm_extension
            and self.src_seq == other.src_seq
        )


class ControlEventKind(IntEnum):
    PAUSE = 0
    RESUME = 1
    SET_RESOLUTION = 2
    RESET_ANCHOR = 3


@dataclass(frozen=True)
class ControlEvent:
    kind: ControlEventKind
    ts: Timestamp
    value: float = 0.0

    def __post_init__(self):
        if self.kind == ControlEventKind.SET_RESOLUTION and not 0.0 < self.value <= 10.0:
            raise ValueError("resolution must be in (0, 10]")


@dataclass(frozen=True)
class StatsSample:
    """One second of pipeline health: rate, end-to-end latency, drops."""

    topic: str
    ts: Timestamp
    measured_hz: float
    p50_ms: float = 0.0
    p99_ms: float = 0.0
    dropped: int = 0
    has_latency: bool = False  # False flags an empty latency window

    def __post_init__(self):
        if self.measured_hz < 0.0:
            raise ValueError("measured_hz must be >= 0")
        if self.has_latency and self.p50_ms > self.p99_ms:
            raise ValueError("p50 must be <= p99")


PAYLOAD_TYPES = (HandFrame, RobotCommand, RobotState, ControlEvent, StatsSample)
Payload = HandFrame | RobotCommand | RobotState | ControlEvent | StatsSample


@dataclass(eq=False)
class Envelope:
    topic: str
    seq: int
    ts: Timestamp
    payload: Payload

    def __eq__(self, other):
        if not isinstance(other, Envelope):
            return NotImplemented
        return (
            self.topic == other.topic
            and self.seq == other.seq
            and self.ts == other.ts
            and self.payload == other.payload
        )


class PolicyMode(IntEnum):
    QUEUE = 0
    CONFLATE = 1


@dataclass(frozen=True)
class TopicPolicy:
    """Delivery policy for a subscription: bounded FIFO or keep-latest."""

    mode: PolicyMode
    bound: int = 1

    def __post_init__(self):
        if self.mode == PolicyMode.QUEUE and self.bound < 1:
            raise ValueError("queue bound must be >= 1")

    @classmethod
    def queue(cls, bound):
        return cls(PolicyMode.QUEUE, bound)

    @classmethod
    def conflate(cls):
        return cls(PolicyMode.CONFLATE)


def _opt_eq(a, b):
    if a is None or b is None:
        return a is None and b is None
    return np.array_equal(a, b)
