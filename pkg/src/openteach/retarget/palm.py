"""Palm coordinate frame from wrist and knuckle keypoints.

The frame spans a 2D plane along the palm: u runs from the wrist to the
index knuckle, n is the palm-plane normal, and y = n x u completes the
right-handed triad. Temporal deltas of this frame drive the end-effector
orientation.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateHand
from ..transforms import normalize

MIN_TRIANGLE_AREA = 1e-8  # m^2, wrist / index-knuckle / pinky-knuckle


@dataclass(frozen=True)
class PalmFrame:
    origin: np.ndarray    # wrist position, meters
    rotation: np.ndarray  # 3x3, columns (u, y, n)

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float)
        if np.max(np.abs(R.T @ R - np.eye(3))) > 1e-9:
            raise ValueError("palm rotation is not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > 1e-9:
            raise ValueError("palm rotation must have det +1")
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))
        object.__setattr__(self, "rotation", R)

    @property
    def u(self):
        return self.rotation[:, 0]

    @property
    def y(self):
        return self.rotation[:, 1]

    @property
    def normal(self):
        return self.rotation[:, 2]

    def to_palm_2d(self, point):
        """(u, y) coordinates and normal height of a world point."""
        d = np.asarray(point, dtype=float) - self.origin
        return np.array([d @ self.u, d @ self.y]), float(d @ self.normal)


def palm_frame(frame):
    """Build the palm frame of a hand frame.

    Raises DegenerateHand when wrist, index knuckle and pinky knuckle are
    collinear (triangle area <= 1e-8 m^2).
    """
    wrist = frame.wrist
    v_index = frame.knuckle("index") - wrist
    v_pinky = frame.knuckle("pinky") - wrist
    cross = np.cross(v_index, v_pinky)
    if 0.5 * np.linalg.norm(cross) <= MIN_TRIANGLE_AREA:
        raise DegenerateHand("wrist and knuckle keypoints are collinear")
    u = normalize(v_index)
    n = normalize(cross)
    y = np.cross(n, u)
    return PalmFrame(origin=wrist.copy(), rotation=np.column_stack((u, y, n)))
