"""Pipeline configuration: a TOML file of tables covering the bus, topics,
robot model, retargeting parameters, and rates. Every key has a default, so
an empty file (or none at all) yields the stock 90 Hz kinematic arm."""

import sys
from dataclasses import dataclass, field

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..retarget import (
    HandRetargetConfig,
    MobileRetargetConfig,
    PinchConfig,
    ThumbBounds,
)
from ..simrobot import ArmEnv, HandEnv, MobileEnv, PdGains
from ..wire.bus import Bus
from ..wire.messages import (
    ControlEvent,
    HandFrame,
    RobotCommand,
    RobotState,
    StatsSample,
    TopicPolicy,
)
from .loop import LoopConfig, LoopTopics

RATE_PRESETS = {"90hz": 90.0, "60hz": 60.0, "20hz": 20.0, "5hz": 5.0}


@dataclass
class PipelineConfig:
    robot: str = "arm"
    rate_hz: float = 90.0
    kinematic: bool = True
    source: str = "synth"
    auto_engage: bool = True
    stale_after_s: float = 1.0
    resolution: float = 1.0
    topics: LoopTopics = field(default_factory=LoopTopics)
    bus_endpoint: tuple | None = None      # (host, port) TCP egress
    gateway_host: str = "127.0.0.1"
    gateway_port: int = 8765
    gateway_update_hz: float = 30.0
    kp: float = 100.0
    gravity_bias: float = 0.0
    compensate: bool = True
    pinch: PinchConfig = field(default_factory=PinchConfig)
    hand_cfg: HandRetargetConfig = field(default_factory=HandRetargetConfig)
    mobile_cfg: MobileRetargetConfig = field(default_factory=MobileRetargetConfig)
    synth_script: str = "circle"
    synth_radius: float = 0.1
    synth_orbit_hz: float = 0.5

    @classmethod
    def load(cls, path=None):
        raw = {}
        if path is not None:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw):
        cfg = cls()
        pipe = raw.get("pipeline", {})
        cfg.robot = pipe.get("robot", cfg.robot)
        cfg.rate_hz = float(pipe.get("rate_hz", cfg.rate_hz))
        cfg.kinematic = bool(pipe.get("kinematic", cfg.kinematic))
        cfg.source = pipe.get("source", cfg.source)
        cfg.auto_engage = bool(pipe.get("auto_engage", cfg.auto_engage))
        cfg.stale_after_s = float(pipe.get("stale_after_s", cfg.stale_after_s))

        topics = raw.get("topics", {})
        cfg.topics = LoopTopics(
            hand=topics.get("hand", "hand/frames"),
            command=topics.get("command", "robot/cmd"),
            state=topics.get("state", "robot/state"),
            control=topics.get("control", "control"),
            stats=topics.get("stats", "stats"),
        )

        bus = raw.get("bus", {})
        if "endpoint" in bus:
            host, _, port = bus["endpoint"].rpartition(":")
            cfg.bus_endpoint = (host or "127.0.0.1", int(port))

        gw = raw.get("gateway", {})
        cfg.gateway_host = gw.get("host", cfg.gateway_host)
        cfg.gateway_port = int(gw.get("port", cfg.gateway_port))
        cfg.gateway_update_hz = float(gw.get("update_hz", cfg.gateway_update_hz))

        robot = raw.get("robot", {})
        cfg.kp = float(robot.get("kp", cfg.kp))
        cfg.gravity_bias = float(robot.get("gravity_bias", cfg.gravity_bias))
        cfg.compensate = bool(robot.get("compensate", cfg.compensate))

        rt = raw.get("retarget", {})
        cfg.resolution = float(rt.get("resolution", cfg.resolution))
        pinch = rt.get("pinch", {})
        cfg.pinch = PinchConfig(
            tip_a=pinch.get("tip_a", "thumb"),
            tip_b=pinch.get("tip_b", "pinky"),
            close_threshold=float(pinch.get("close_threshold", 0.02)),
            release_threshold=float(pinch.get("release_threshold", 0.04)),
            debounce=float(pinch.get("debounce", 0.05)),
        )
        thumb = rt.get("thumb", {})
        if thumb:
            bounds = ThumbBounds(
                human_quad=np.array(thumb["human_quad"], dtype=float),
                robot_quad=np.array(thumb["robot_quad"], dtype=float),
                human_height=tuple(thumb["human_height"]),
                robot_height=tuple(thumb["robot_height"]),
            )
            cfg.hand_cfg = HandRetargetConfig(thumb_bounds=bounds)
        mobile = rt.get("mobile", {})
        if mobile:
            cfg.mobile_cfg = MobileRetargetConfig(
                k_base=float(mobile.get("k_base", 1.0)),
                deadband=float(mobile.get("deadband", 0.02)),
            )

        synth = raw.get("source", {}).get("synth", {})
        cfg.synth_script = synth.get("script", cfg.synth_script)
        cfg.synth_radius = float(synth.get("radius", cfg.synth_radius))
        cfg.synth_orbit_hz = float(synth.get("orbit_hz", cfg.synth_orbit_hz))
        return cfg

    def loop_config(self):
        return LoopConfig(
            robot=self.robot, rate_hz=self.rate_hz, resolution=self.resolution,
            auto_engage=self.auto_engage, stale_after_s=self.stale_after_s,
            pinch=self.pinch, hand_cfg=self.hand_cfg, mobile_cfg=self.mobile_cfg,
            topics=self.topics,
        )


def build_bus(cfg):
    """Register the standard topic set with the pipeline's loss policies:
    freshest-wins for frames and states, lossless-ish queues for control."""
    bus = Bus()
    bus.register(cfg.topics.hand, HandFrame, TopicPolicy.conflate())
    bus.register(cfg.topics.command, RobotCommand, TopicPolicy.queue(1024))
    bus.register(cfg.topics.state, RobotState, TopicPolicy.conflate())
    bus.register(cfg.topics.control, ControlEvent, TopicPolicy.queue(256))
    bus.register(cfg.topics.stats, StatsSample, TopicPolicy.queue(64))
    return bus


def build_env(cfg):
    n = 7 if cfg.robot == "arm" else 16
    if cfg.robot == "arm":
        gains = PdGains.critically_damped(cfg.kp, 7, cfg.gravity_bias, cfg.compensate)
        return ArmEnv(gains=gains, kinematic=cfg.kinematic)
    if cfg.robot == "hand":
        gains = PdGains.critically_damped(cfg.kp, n, cfg.gravity_bias, cfg.compensate)
        return HandEnv(gains=gains, kinematic=cfg.kinematic)
    if cfg.robot == "mobile":
        return MobileEnv()
    raise ValueError(f"unknown robot kind {cfg.robot!r}")
