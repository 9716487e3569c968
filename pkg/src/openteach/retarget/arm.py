"""Clutched delta-pose arm retargeting.

Wrist translation since the last clutch engage, scaled by the resolution,
is added to the anchored end-effector position; the palm frame's rotation
delta composes onto the anchored orientation. Orientation is never scaled
by the resolution. Everything is a pure function of (state, frame) so
pausing and re-anchoring are exact.
"""

from dataclasses import dataclass, replace

import numpy as np

from ..errors import Paused
from ..transforms import quat_from_mat, quat_mul, quat_normalize
from .palm import PalmFrame, palm_frame

MAX_RESOLUTION = 10.0


@dataclass(frozen=True)
class EndEffectorTarget:
    position: np.ndarray     # meters, robot base frame
    orientation: np.ndarray  # unit quaternion (w, x, y, z)
    frame: str = "base"

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        quat = np.asarray(self.orientation, dtype=float)
        if abs(np.linalg.norm(quat) - 1.0) > 1e-9:
            raise ValueError("orientation must be a unit quaternion")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "orientation", quat)


@dataclass(frozen=True)
class MobileAnchor:
    lift_height: float
    arm_extension: float
    wrist_orientation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "wrist_orientation",
                           np.asarray(self.wrist_orientation, dtype=float))


@dataclass(frozen=True)
class ClutchState:
    """Session state making retargeting a pure function of (state, frame)."""

    paused: bool = True
    resolution: float = 1.0
    anchor_hand: PalmFrame | None = None
    anchor_ee: EndEffectorTarget | None = None
    anchor_mobile: MobileAnchor | None = None

    def __post_init__(self):
        if not 0.0 < self.resolution <= MAX_RESOLUTION:
            raise ValueError(f"resolution must be in (0, {MAX_RESOLUTION}]")
        if not self.paused and (self.anchor_hand is None or self.anchor_ee is None):
            raise ValueError("an engaged clutch must carry anchors")


def clutch_pause(cs):
    return replace(cs, paused=True)


def clutch_resume(cs, frame, ee_pose, mobile_anchor=None):
    """Re-engage: anchor the current hand pose against the current robot pose.

    Raises DegenerateHand when the resume-time hand frame is unusable.
    """
    anchor = palm_frame(frame)
    return replace(cs, paused=False, anchor_hand=anchor, anchor_ee=ee_pose,
                   anchor_mobile=mobile_anchor)


def set_resolution(cs, value, frame=None, ee_pose=None, mobile_anchor=None):
    """Change the position scale. When the clutch is engaged the anchors are
    re-taken at the current pose so the change never teleports the target."""
    if not 0.0 < value <= MAX_RESOLUTION:
        raise ValueError(f"resolution must be in (0, {MAX_RESOLUTION}]")
    if not cs.paused and frame is not None and ee_pose is not None:
        cs = clutch_resume(cs, frame, ee_pose, mobile_anchor)
    return replace(cs, resolution=value)


def arm_retarget(cs, frame, headset_to_base=None):
    """Map a hand frame to an end-effector target.

    Position: anchor + resolution * wrist displacement (in base axes).
    Orientation: palm rotation delta composed onto the anchored orientation.
    """
    if cs.paused:
        raise Paused("clutch is paused")
    pf = palm_frame(frame)
    # A hand exactly at the anchor must return the anchor pose bit-exactly.
    if (np.array_equal(pf.origin, cs.anchor_hand.origin)
            and np.array_equal(pf.rotation, cs.anchor_hand.rotation)):
        return cs.anchor_ee
    R_hb = np.eye(3) if headset_to_base is None else np.asarray(headset_to_base, dtype=float)

    dp = cs.resolution * (pf.origin - cs.anchor_hand.origin)
    position = cs.anchor_ee.position + R_hb @ dp

    dR = pf.rotation @ cs.anchor_hand.rotation.T
    dR_base = R_hb @ dR @ R_hb.T
    orientation = quat_normalize(quat_mul(quat_from_mat(dR_base), cs.anchor_ee.orientation))
    return EndEffectorTarget(position=position, orientation=orientation,
                             frame=cs.anchor_ee.frame)
