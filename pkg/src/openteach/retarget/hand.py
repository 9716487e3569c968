"""Finger-joint retargeting for a 16-DOF robot hand.

Index, middle and ring flexions are read straight off the teacher's hand as
the angles between consecutive bones; abduction is the signed in-palm angle
of the proximal bone against the finger's neutral ray. The thumb goes
through the workspace mapping and an IK solve instead, and the human pinky
is ignored (the robot hand has no pinky channel).
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateFinger
from ..simrobot import models
from ..wire.messages import Hand, knuckle_index
from .palm import palm_frame
from .thumb import ThumbBounds, thumb_ik, thumb_retarget

MIN_BONE_LENGTH = 1e-6       # m
MIN_PALM_PROJECTION = 1e-9   # below this the abduction is undefined; emit 0

ROBOT_FINGERS = ("thumb", "index", "middle", "ring")  # pinky channel unused

DEFAULT_THUMB_BOUNDS = ThumbBounds(
    human_quad=np.array([[0.00, -0.13], [0.13, -0.13], [0.13, 0.01], [0.00, 0.01]]),
    robot_quad=np.array([[0.02, -0.06], [0.09, -0.06], [0.09, 0.06], [0.02, 0.06]]),
    human_height=(-0.02, 0.08),
    robot_height=(-0.04, 0.04),
)


def _default_rays():
    from ..hands import neutral_ray
    return {f: neutral_ray(f) for f in ("index", "middle", "ring")}


@dataclass(frozen=True)
class HandRetargetConfig:
    thumb_bounds: ThumbBounds = DEFAULT_THUMB_BOUNDS
    thumb_chain: object = field(default_factory=models.thumb_chain)
    neutral_rays: dict = field(default_factory=_default_rays)
    limits: tuple = field(default_factory=models.hand16_limits)
    abduction_sign: float = 1.0


@dataclass(frozen=True)
class HandJointTarget:
    """16 joint angles, finger-major [thumb, index, middle, ring], each
    finger [base/abduction, mcp, pip, dip]."""

    angles: np.ndarray
    thumb_clamped: bool = False
    thumb_residual: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        if a.shape != (16,):
            raise ValueError("expected 16 joint angles")
        object.__setattr__(self, "angles", a)

    def finger(self, name):
        i = ROBOT_FINGERS.index(name)
        return self.angles[4 * i:4 * i + 4]


def _bone(a, b):
    v = b - a
    if np.linalg.norm(v) <= MIN_BONE_LENGTH:
        raise DegenerateFinger("zero-length bone")
    return v


def _flexion(v1, v2):
    c = np.dot(v1, v2) / (np.linalg.norm(v1) * np.linalg.norm(v2))
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def flexion_angles(points):
    """Angles between consecutive bones of a keypoint chain, one angle per
    interior keypoint, each in [0, pi]."""
    points = np.asarray(points, dtype=float)
    bones = [_bone(points[i], points[i + 1]) for i in range(len(points) - 1)]
    return np.array([_flexion(bones[i], bones[i + 1]) for i in range(len(bones) - 1)])


def finger_joint_angles(frame, cfg=None, thumb_seed=None):
    """Retarget a hand frame to 16 robot hand joint angles."""
    cfg = cfg or HandRetargetConfig()
    pf = palm_frame(frame)
    sign = cfg.abduction_sign * (-1.0 if frame.hand == Hand.RIGHT else 1.0)

    angles = np.zeros(16)
    tip = thumb_retarget(frame, cfg.thumb_bounds)
    result = thumb_ik(tip, cfg.thumb_chain, seed=thumb_seed)
    angles[0:4] = result.q

    for slot, finger in enumerate(ROBOT_FINGERS[1:], start=1):
        base = knuckle_index(finger)
        chain = np.vstack([frame.wrist, frame.keypoints[base:base + 4]])
        flex = flexion_angles(chain)  # at knuckle, pip, dip

        proximal = _bone(frame.keypoints[base], frame.keypoints[base + 1])
        proj, _ = pf.to_palm_2d(pf.origin + proximal)
        if np.linalg.norm(proj) < MIN_PALM_PROJECTION:
            abduction = 0.0
        else:
            ray = cfg.neutral_rays[finger]
            ccw = np.arctan2(ray[0] * proj[1] - ray[1] * proj[0], ray @ proj)
            abduction = sign * ccw  # positive toward the thumb side
        angles[4 * slot:4 * slot + 4] = [abduction, *flex]

    lo, hi = cfg.limits
    return HandJointTarget(angles=np.clip(angles, lo, hi),
                           thumb_clamped=result.clamped,
                           thumb_residual=result.residual)
