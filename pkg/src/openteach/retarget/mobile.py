"""Mobile-manipulator retargeting.

Wrist displacement since the clutch anchor decomposes along headset axes:
forward drives the arm extension, vertical the lift, and lateral motion
becomes a base velocity after a deadband. The wrist orientation delta maps
onto the robot wrist exactly as in arm retargeting, and gripper toggles
come from the index-thumb pinch.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import Paused
from ..simrobot import models
from ..transforms import quat_from_mat, quat_mul, quat_normalize
from .palm import palm_frame
from .pinch import PinchConfig, pinch_detect


@dataclass(frozen=True)
class MobileBaseTarget:
    base_lateral_velocity: float   # m/s
    lift_height: float             # m
    arm_extension: float           # m
    wrist_orientation: np.ndarray  # unit quaternion
    gripper_toggle: bool = False

    def __post_init__(self):
        object.__setattr__(self, "wrist_orientation",
                           np.asarray(self.wrist_orientation, dtype=float))


@dataclass(frozen=True)
class MobileRetargetConfig:
    k_base: float = 1.0                    # (m/s) per meter of lateral offset
    deadband: float = 0.02                 # m of lateral slack
    lift_range: tuple = models.MOBILE_LIFT_RANGE
    extension_range: tuple = models.MOBILE_EXTENSION_RANGE
    forward_axis: int = 0                  # headset x
    lateral_axis: int = 1                  # headset y
    vertical_axis: int = 2                 # headset z
    pinch: PinchConfig = field(
        default_factory=lambda: PinchConfig(tip_a="thumb", tip_b="index"))


def mobile_retarget(cs, frame, ps, cfg=None):
    """Map a hand frame to a mobile base target.

    Returns (MobileBaseTarget, new PinchState); the toggle flag is set on
    the one frame where the index-thumb pinch fires.
    """
    if cs.paused:
        raise Paused("clutch is paused")
    cfg = cfg or MobileRetargetConfig()
    pf = palm_frame(frame)
    anchor = cs.anchor_mobile
    delta = pf.origin - cs.anchor_hand.origin

    extension = float(np.clip(
        anchor.arm_extension + cs.resolution * delta[cfg.forward_axis],
        *cfg.extension_range))
    lift = float(np.clip(
        anchor.lift_height + cs.resolution * delta[cfg.vertical_axis],
        *cfg.lift_range))

    lateral = delta[cfg.lateral_axis]
    slack = abs(lateral) - cfg.deadband
    velocity = cfg.k_base * np.sign(lateral) * slack if slack > 0.0 else 0.0

    dR = pf.rotation @ cs.anchor_hand.rotation.T
    wrist = quat_normalize(quat_mul(quat_from_mat(dR), anchor.wrist_orientation))

    ps, event = pinch_detect(ps, frame, cfg.pinch)
    target = MobileBaseTarget(
        base_lateral_velocity=float(velocity),
        lift_height=lift,
        arm_extension=extension,
        wrist_orientation=wrist,
        gripper_toggle=event is not None,
    )
    return target, ps
