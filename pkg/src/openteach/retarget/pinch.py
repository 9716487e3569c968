"""Pinch-to-toggle gripper detection.

A toggle fires once the fingertip distance has stayed below the close
threshold for the debounce time, and cannot fire again until the distance
has risen above the release threshold (hysteresis), so a held pinch and
tracking chatter each produce exactly one toggle.
"""

from dataclasses import dataclass, replace

import numpy as np

from ..wire.messages import Timestamp


@dataclass(frozen=True)
class PinchConfig:
    tip_a: str = "thumb"
    tip_b: str = "pinky"
    close_threshold: float = 0.02   # m
    release_threshold: float = 0.04  # m
    debounce: float = 0.05          # s of continuous closure before a toggle

    def __post_init__(self):
        if not 0.0 < self.close_threshold < self.release_threshold:
            raise ValueError("need release_threshold > close_threshold > 0")
        if self.debounce < 0.0:
            raise ValueError("debounce must be >= 0")


@dataclass(frozen=True)
class PinchState:
    gripper_closed: bool = False
    below_since: Timestamp | None = None
    armed: bool = True


@dataclass(frozen=True)
class GripperToggleEvent:
    ts: Timestamp
    closed: bool  # gripper state after the toggle


def pinch_detect(ps, frame, cfg):
    """Advance the pinch state machine by one hand frame.

    Returns (new state, GripperToggleEvent or None).
    """
    distance = float(np.linalg.norm(frame.tip(cfg.tip_a) - frame.tip(cfg.tip_b)))

    if distance > cfg.release_threshold:
        return replace(ps, below_since=None, armed=True), None
    if distance >= cfg.close_threshold:
        # hysteresis band: closure streak broken, arming unchanged
        return replace(ps, below_since=None), None

    below_since = ps.below_since if ps.below_since is not None else frame.ts
    held = (frame.ts.mono_ns - below_since.mono_ns) * 1e-9
    if ps.armed and held >= cfg.debounce:
        closed = not ps.gripper_closed
        event = GripperToggleEvent(ts=frame.ts, closed=closed)
        return PinchState(gripper_closed=closed, below_since=below_since,
                          armed=False), event
    return replace(ps, below_since=below_since), None
