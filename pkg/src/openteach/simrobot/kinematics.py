"""Serial-chain kinematics for revolute-joint models.

A model is an ordered list of joints, each carrying a fixed link transform
applied before its rotation, plus a fixed tool transform after the last
joint:

    T(q) = link_1 rot(axis_1, q_1) link_2 rot(axis_2, q_2) ... tool
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch
from ..transforms import quat_from_mat, rot_axis_angle


def transform(rotation=None, translation=None):
    """Build a 4x4 homogeneous transform."""
    T = np.eye(4)
    if rotation is not None:
        T[:3, :3] = rotation
    if translation is not None:
        T[:3, 3] = translation
    return T


@dataclass(frozen=True)
class Joint:
    axis: np.ndarray                 # unit 3-vector, joint-local
    link: np.ndarray                 # 4x4 transform applied before the joint
    limits: tuple[float, float] = (-np.pi, np.pi)

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        n = np.linalg.norm(axis)
        if not np.isclose(n, 1.0, atol=1e-9):
            raise ValueError("joint axis must be unit norm")
        lo, hi = self.limits
        if not lo < hi:
            raise ValueError("joint limits must satisfy lo < hi")
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "link", np.asarray(self.link, dtype=float))


@dataclass(frozen=True)
class KinematicModel:
    joints: tuple[Joint, ...]
    tool: np.ndarray = field(default_factory=lambda: np.eye(4))
    name: str = "chain"

    def __post_init__(self):
        object.__setattr__(self, "joints", tuple(self.joints))
        object.__setattr__(self, "tool", np.asarray(self.tool, dtype=float))

    @property
    def njoints(self):
        return len(self.joints)

    @property
    def lower(self):
        return np.array([j.limits[0] for j in self.joints])

    @property
    def upper(self):
        return np.array([j.limits[1] for j in self.joints])

    def clamp(self, q):
        return np.clip(q, self.lower, self.upper)

    def reach(self):
        """Upper bound on distance from base to tool (sum of link offsets)."""
        total = float(np.linalg.norm(self.tool[:3, 3]))
        for j in self.joints:
            total += float(np.linalg.norm(j.link[:3, 3]))
        return total


def fk(model, q):
    """End-effector pose as a 4x4 transform."""
    q = np.asarray(q, dtype=float)
    if q.shape != (model.njoints,):
        raise DimensionMismatch(f"expected {model.njoints} joint values, got {q.shape}")
    T = np.eye(4)
    for joint, qi in zip(model.joints, q):
        T = T @ joint.link
        T[:3, :3] = T[:3, :3] @ rot_axis_angle(joint.axis, qi)
    return T @ model.tool


def fk_position(model, q):
    return fk(model, q)[:3, 3]


def fk_pose(model, q):
    """(position, quaternion wxyz) of the end effector."""
    T = fk(model, q)
    return T[:3, 3].copy(), quat_from_mat(T[:3, :3])


def joint_frames(model, q):
    """World frame of each joint (after its link, before its rotation applies
    downstream), plus the final ee transform. Used by the Jacobian."""
    q = np.asarray(q, dtype=float)
    if q.shape != (model.njoints,):
        raise DimensionMismatch(f"expected {model.njoints} joint values, got {q.shape}")
    frames = []
    T = np.eye(4)
    for joint, qi in zip(model.joints, q):
        T = T @ joint.link
        frames.append(T.copy())
        T[:3, :3] = T[:3, :3] @ rot_axis_angle(joint.axis, qi)
    return frames, T @ model.tool


def jacobian(model, q):
    """Geometric Jacobian, rows [linear; angular], shape (6, n)."""
    frames, ee = joint_frames(model, q)
    p_ee = ee[:3, 3]
    J = np.zeros((6, model.njoints))
    for i, (joint, frame) in enumerate(zip(model.joints, frames)):
        axis_w = frame[:3, :3] @ joint.axis
        J[:3, i] = np.cross(axis_w, p_ee - frame[:3, 3])
        J[3:, i] = axis_w
    return J
