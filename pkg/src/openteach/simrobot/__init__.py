from . import models
from .dynamics import JointState, PdGains, pd_step
from .env import ArmEnv, HandEnv, MobileEnv, step_env
from .ik import ik_dls
from .kinematics import (
    Joint,
    KinematicModel,
    fk,
    fk_pose,
    fk_position,
    jacobian,
    transform,
)

__all__ = [
    "models", "JointState", "PdGains", "pd_step", "ArmEnv", "HandEnv",
    "MobileEnv", "step_env", "ik_dls", "Joint", "KinematicModel", "fk",
    "fk_pose", "fk_position", "jacobian", "transform",
]
