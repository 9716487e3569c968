"""Desk-scale hand-to-robot teleoperation.

A pub/sub pipeline that ingests 21-keypoint hand poses, retargets them onto
simulated robots (arm, 16-DOF hand, two-fingered gripper, mobile base),
records timestamp-aligned demonstrations, and trains simple imitation
policies on them. A browser console serves as the operator surface.
"""

__version__ = "0.1.0"

from . import errors, hands, imitation, pipeline, recorder, retarget, simrobot, wire

__all__ = ["errors", "hands", "imitation", "pipeline", "recorder",
           "retarget", "simrobot", "wire", "__version__"]
