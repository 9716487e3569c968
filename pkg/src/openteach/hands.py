"""A synthetic articulated hand.

Stands in for a headset's hand-pose estimator: a fixed 21-keypoint template
(wrist, then thumb..pinky, knuckle to tip) that can be posed by a rigid
wrist transform, per-finger curl, and a pinch override. The same template
constants drive the browser console's input rig, so both produce
byte-compatible frames.
"""

import numpy as np

from .transforms import normalize, rot_axis_angle
from .wire.messages import FINGERS, Hand, HandFrame, Timestamp

# Template geometry, meters, palm in the z=0 plane, fingers fanning +x.
KNUCKLES = {
    "thumb": np.array([0.025, -0.030, 0.0]),
    "index": np.array([0.095, -0.005, 0.0]),
    "middle": np.array([0.098, 0.020, 0.0]),
    "ring": np.array([0.092, 0.045, 0.0]),
    "pinky": np.array([0.082, 0.068, 0.0]),
}
SEGMENTS = {
    "thumb": (0.045, 0.035, 0.030),
    "index": (0.042, 0.028, 0.022),
    "middle": (0.046, 0.030, 0.024),
    "ring": (0.042, 0.028, 0.022),
    "pinky": (0.032, 0.022, 0.018),
}
DIRECTIONS = {
    "thumb": normalize(np.array([0.060, -0.050, 0.0])),
    "index": normalize(KNUCKLES["index"]),
    "middle": normalize(KNUCKLES["middle"]),
    "ring": normalize(KNUCKLES["ring"]),
    "pinky": normalize(KNUCKLES["pinky"]),
}
PALM_NORMAL = np.array([0.0, 0.0, 1.0])


def template_keypoints():
    """The neutral right-hand template, shape (21, 3)."""
    pts = np.zeros((21, 3))
    for f, finger in enumerate(FINGERS):
        p = KNUCKLES[finger].copy()
        pts[1 + 4 * f] = p
        for s, seg in enumerate(SEGMENTS[finger]):
            p = p + seg * DIRECTIONS[finger]
            pts[2 + 4 * f + s] = p
    return pts


def posed_keypoints(wrist=(0.0, 0.0, 0.0), rotation=None, curls=None, pinch=None):
    """Pose the template.

    curls: per-finger scalars in [0, 1]; curl c bends each of the three
    finger joints by c * pi/2 toward the palm. pinch: None, "pinky" or
    "index"; when set, the thumb tip is snapped next to that fingertip.
    """
    pts = template_keypoints()
    curls = np.zeros(5) if curls is None else np.clip(np.asarray(curls, float), 0.0, 1.0)
    for f, finger in enumerate(FINGERS):
        c = curls[f]
        if c == 0.0:
            continue
        angle = c * np.pi / 2.0
        axis = normalize(np.cross(DIRECTIONS[finger], PALM_NORMAL))
        R = rot_axis_angle(axis, angle)
        base = 1 + 4 * f
        # bend at knuckle, pip, dip; each rotation carries all distal points
        for joint in range(3):
            pivot = pts[base + joint]
            for k in range(base + joint + 1, base + 4):
                pts[k] = pivot + R @ (pts[k] - pivot)
    if pinch is not None:
        target = pts[4 + 4 * FINGERS.index(pinch)]
        pts[4] = target + np.array([0.004, 0.0, 0.0])  # thumb tip next to it
    if rotation is not None:
        pts = pts @ np.asarray(rotation, dtype=float).T
    return pts + np.asarray(wrist, dtype=float)


def make_frame(ts=None, wrist=(0.0, 0.0, 0.0), rotation=None, curls=None,
               pinch=None, hand=Hand.RIGHT, confidence=1.0):
    pts = posed_keypoints(wrist, rotation, curls, pinch)
    if hand == Hand.LEFT:
        pts = pts * np.array([1.0, -1.0, 1.0])
    return HandFrame(ts=ts or Timestamp.now(), hand=hand, keypoints=pts,
                     confidence=confidence)


def neutral_ray(finger):
    """Palm-plane direction of the finger's proximal bone in the template."""
    from .retarget.palm import palm_frame  # local import avoids a cycle
    frame = HandFrame(ts=Timestamp(0, 1), hand=Hand.RIGHT,
                      keypoints=template_keypoints())
    pf = palm_frame(frame)
    base = 1 + 4 * FINGERS.index(finger)
    bone = frame.keypoints[base + 1] - frame.keypoints[base]
    ray, _ = pf.to_palm_2d(pf.origin + bone)
    return normalize(ray)
