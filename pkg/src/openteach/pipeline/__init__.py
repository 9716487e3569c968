from .config import RATE_PRESETS, PipelineConfig, build_bus, build_env
from .gateway import Gateway
from .loop import LoopConfig, LoopTopics, TeleopLoop
from .rate import RateLimiter
from .run import bench, run_teleop_loop
from .source import (
    PoseSpec,
    SynthHandSource,
    circle_orbit,
    constant_pose,
    script_frame,
    script_timestamp,
    waypoint_script,
)
from .stats import LatencyProbe

__all__ = [
    "RATE_PRESETS", "PipelineConfig", "build_bus", "build_env", "Gateway",
    "LoopConfig", "LoopTopics", "TeleopLoop", "RateLimiter", "bench",
    "run_teleop_loop", "PoseSpec", "SynthHandSource", "circle_orbit",
    "constant_pose", "script_frame", "script_timestamp", "waypoint_script",
    "LatencyProbe",
]
