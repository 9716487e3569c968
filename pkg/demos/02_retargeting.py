"""Hand-to-robot retargeting walkthrough.

Builds a palm frame from keypoints, drives the clutched arm mapping
through a pause/resume cycle, reads finger joint angles off a curled
hand, maps the thumb through its workspace homography, and fires the
pinch toggle.
"""

import numpy as np

from openteach.hands import make_frame
from openteach.retarget import (
    ClutchState,
    EndEffectorTarget,
    HandRetargetConfig,
    PinchConfig,
    PinchState,
    arm_retarget,
    clutch_pause,
    clutch_resume,
    finger_joint_angles,
    palm_frame,
    pinch_detect,
    thumb_retarget,
)
from openteach.transforms import rot_z
from openteach.wire import Timestamp

# -- palm frame ---------------------------------------------------------------
neutral = make_frame(ts=Timestamp(0, 1))
pf = palm_frame(neutral)
print("palm frame origin:", np.round(pf.origin, 3))
print("orthonormal within", np.max(np.abs(pf.rotation.T @ pf.rotation - np.eye(3))))

# -- clutched arm mapping -------------------------------------------------------
home = EndEffectorTarget(position=np.array([0.4, 0.0, 0.6]),
                         orientation=np.array([1.0, 0.0, 0.0, 0.0]))
cs = clutch_resume(ClutchState(paused=True, resolution=0.5), neutral, home)

moved = make_frame(ts=Timestamp(1, 1), wrist=(0.10, 0.0, 0.0))
target = arm_retarget(cs, moved)
print("\nwrist +10 cm at resolution 0.5 -> ee moves",
      np.round(target.position - home.position, 3), "m")

rotated = make_frame(ts=Timestamp(2, 1), rotation=rot_z(np.deg2rad(30)))
target = arm_retarget(cs, rotated)
print("palm yawed 30 deg -> ee quaternion", np.round(target.orientation, 3))

# pause, wander, resume: no jump
cs = clutch_pause(cs)
wandered = make_frame(ts=Timestamp(3, 1), wrist=(0.5, -0.2, 0.3))
cs = clutch_resume(cs, wandered, home)
print("post-resume target equals the robot pose it re-anchored to:",
      np.array_equal(arm_retarget(cs, wandered).position, home.position))

# -- finger joints -------------------------------------------------------------
curled = make_frame(ts=Timestamp(4, 1), curls=[0.0, 1.0, 0.5, 0.0, 0.0])
joints = finger_joint_angles(curled, HandRetargetConfig())
print("\nindex fully curled ->", np.round(joints.finger("index"), 3),
      "(abduction, mcp, pip, dip)")
print("middle half curled  ->", np.round(joints.finger("middle"), 3))

# -- thumb workspace mapping -----------------------------------------------------
cfg = HandRetargetConfig()
tip = thumb_retarget(neutral, cfg.thumb_bounds)
print("\nthumb tip maps into the robot workspace at", np.round(tip, 4))

# -- pinch toggle ---------------------------------------------------------------
pinch_cfg = PinchConfig()
ps = PinchState()
toggles = 0
for i in range(30):
    pinched = i >= 5  # pinch held from frame 5 onward
    f = make_frame(ts=Timestamp(int(i * 0.02e9) + 1, 1),
                   pinch="pinky" if pinched else None)
    ps, event = pinch_detect(ps, f, pinch_cfg)
    toggles += event is not None
print(f"\nheld pinch over 25 frames -> exactly {toggles} gripper toggle")
