"""Reference robot models. Stand-in geometry, not calibrated to any hardware."""

import numpy as np

from .kinematics import Joint, KinematicModel, transform

X = np.array([1.0, 0.0, 0.0])
Y = np.array([0.0, 1.0, 0.0])
Z = np.array([0.0, 0.0, 1.0])

ARM_LINK = 0.3
ARM_HOME_Q = np.array([0.0, 0.4, 0.0, -1.2, 0.0, 0.8, 0.0])

THUMB_LINKS = (0.04, 0.03, 0.025)
FINGER_LINKS = (0.04, 0.03, 0.025)

MOBILE_LIFT_RANGE = (0.0, 1.1)
MOBILE_EXTENSION_RANGE = (0.0, 0.5)
MOBILE_RATE_LIMIT = 0.5          # m/s for lift and extension actuators
GRIPPER_ACTUATION_DELAY = 0.1    # s between toggle command and state flip


def arm7():
    """7-DOF arm: alternating z/y axes, 0.3 m between consecutive joints."""
    joints = []
    axes = (Z, Y, Z, Y, Z, Y, Z)
    for i, axis in enumerate(axes):
        link = transform() if i == 0 else transform(translation=(0.0, 0.0, ARM_LINK))
        lim = (-2.9, 2.9) if axis is Z else (-2.0, 2.0)
        joints.append(Joint(axis=axis, link=link, limits=lim))
    return KinematicModel(joints=tuple(joints),
                          tool=transform(translation=(0.0, 0.0, ARM_LINK)),
                          name="arm7")


def thumb_chain():
    """4-joint thumb: base swivel + three flexions along a 0.095 m chain."""
    joints = (
        Joint(axis=Z, link=transform(), limits=(-1.5, 1.5)),
        Joint(axis=Y, link=transform(), limits=(-1.8, 0.4)),
        Joint(axis=Y, link=transform(translation=(THUMB_LINKS[0], 0.0, 0.0)),
              limits=(-1.8, 0.4)),
        Joint(axis=Y, link=transform(translation=(THUMB_LINKS[1], 0.0, 0.0)),
              limits=(-1.8, 0.4)),
    )
    return KinematicModel(joints=joints,
                          tool=transform(translation=(THUMB_LINKS[2], 0.0, 0.0)),
                          name="thumb")


def hand16_limits():
    """(lower, upper) arrays for the 16-DOF hand, finger-major order
    [thumb, index, middle, ring] x [abduction/base, mcp, pip, dip]."""
    lo, hi = [], []
    # thumb channels take the thumb chain's limits
    for j in thumb_chain().joints:
        lo.append(j.limits[0])
        hi.append(j.limits[1])
    for _ in range(3):  # index, middle, ring
        lo.extend([-0.6, -0.4, -0.3, -0.3])
        hi.extend([0.6, 1.8, 1.8, 1.8])
    return np.array(lo), np.array(hi)
