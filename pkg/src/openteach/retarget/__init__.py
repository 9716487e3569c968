from .arm import (
    ClutchState,
    EndEffectorTarget,
    MobileAnchor,
    arm_retarget,
    clutch_pause,
    clutch_resume,
    set_resolution,
)
from .hand import (
    HandJointTarget,
    HandRetargetConfig,
    finger_joint_angles,
    flexion_angles,
)
from .mobile import MobileBaseTarget, MobileRetargetConfig, mobile_retarget
from .palm import PalmFrame, palm_frame
from .pinch import GripperToggleEvent, PinchConfig, PinchState, pinch_detect
from .thumb import (
    ThumbBounds,
    ThumbIkResult,
    apply_homography,
    closest_point_on_quad,
    homography_from_quads,
    point_in_quad,
    thumb_ik,
    thumb_retarget,
)

__all__ = [
    "ClutchState", "EndEffectorTarget", "MobileAnchor", "arm_retarget",
    "clutch_pause", "clutch_resume", "set_resolution", "HandJointTarget",
    "HandRetargetConfig", "finger_joint_angles", "flexion_angles",
    "MobileBaseTarget", "MobileRetargetConfig", "mobile_retarget",
    "PalmFrame", "palm_frame", "GripperToggleEvent", "PinchConfig",
    "PinchState", "pinch_detect", "ThumbBounds", "ThumbIkResult",
    "apply_homography", "closest_point_on_quad", "homography_from_quads",
    "point_in_quad", "thumb_ik", "thumb_retarget",
]
