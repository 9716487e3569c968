"""Lossless JSON codec for payloads.

Used by the demonstration recorder's newline-delimited logs. Floats pass
through Python's shortest-repr JSON encoding, which round-trips doubles
exactly, so a log replay reproduces the in-memory payloads bit for bit.
"""

import numpy as np

from ..errors import UnknownPayloadKind
from .messages import (
    CommandKind,
    ControlEvent,
    ControlEventKind,
    Hand,
    HandFrame,
    RobotCommand,
    RobotState,
    StatsSample,
    Timestamp,
)


def _ts_to_json(ts):
    return {"mono_ns": ts.mono_ns, "wall_us": ts.wall_us}


def _ts_from_json(d):
    return Timestamp(int(d["mono_ns"]), int(d["wall_us"]))


def _vec(v):
    return None if v is None else np.asarray(v, dtype=float).tolist()


def payload_to_json(p):
    if isinstance(p, HandFrame):
        return {"type": "hand_frame", "ts": _ts_to_json(p.ts), "hand": p.hand.name.lower(),
                "keypoints": p.keypoints.tolist(), "confidence": p.confidence}
    if isinstance(p, RobotCommand):
        return {"type": "robot_command", "ts": _ts_to_json(p.ts), "kind": p.kind.name.lower(),
                "src_seq": p.src_seq, "position": _vec(p.position),
                "orientation": _vec(p.orientation), "joints": _vec(p.joints),
                "base_lateral_velocity": p.base_lateral_velocity,
                "lift_height": p.lift_height, "arm_extension": p.arm_extension,
                "wrist_orientation": _vec(p.wrist_orientation),
                "gripper_toggle": p.gripper_toggle}
    if isinstance(p, RobotState):
        return {"type": "robot_state", "ts": _ts_to_json(p.ts), "q": p.q.tolist(),
                "qd": p.qd.tolist(), "ee_position": p.ee_position.tolist(),
                "ee_orientation": p.ee_orientation.tolist(),
                "gripper_closed": p.gripper_closed, "base_pose": p.base_pose.tolist(),
                "lift_height": p.lift_height, "arm_extension": p.arm_extension,
                "src_seq": p.src_seq}
    if isinstance(p, ControlEvent):
        return {"type": "control_event", "ts": _ts_to_json(p.ts),
                "kind": p.kind.name.lower(), "value": p.value}
    if isinstance(p, StatsSample):
        return {"type": "stats_sample", "ts": _ts_to_json(p.ts), "topic": p.topic,
                "measured_hz": p.measured_hz, "p50_ms": p.p50_ms, "p99_ms": p.p99_ms,
                "dropped": p.dropped, "has_latency": p.has_latency}
    raise UnknownPayloadKind(type(p).__name__)


def payload_from_json(d):
    t = d.get("type")
    if t == "hand_frame":
        return HandFrame(_ts_from_json(d["ts"]), Hand[d["hand"].upper()],
                         np.array(d["keypoints"], dtype=float), d["confidence"])
    if t == "robot_command":
        opt = lambda v: None if v is None else np.array(v, dtype=float)
        return RobotCommand(
            CommandKind[d["kind"].upper()], _ts_from_json(d["ts"]), int(d["src_seq"]),
            position=opt(d["position"]), orientation=opt(d["orientation"]),
            joints=opt(d["joints"]),
            base_lateral_velocity=d["base_lateral_velocity"],
            lift_height=d["lift_height"], arm_extension=d["arm_extension"],
            wrist_orientation=opt(d["wrist_orientation"]),
            gripper_toggle=bool(d["gripper_toggle"]))
    if t == "robot_state":
        return RobotState(
            _ts_from_json(d["ts"]), np.array(d["q"], dtype=float),
            np.array(d["qd"], dtype=float), np.array(d["ee_position"], dtype=float),
            np.array(d["ee_orientation"], dtype=float),
            gripper_closed=bool(d["gripper_closed"]),
            base_pose=np.array(d["base_pose"], dtype=float),
            lift_height=d["lift_height"], arm_extension=d["arm_extension"],
            src_seq=int(d["src_seq"]))
    if t == "control_event":
        return ControlEvent(ControlEventKind[d["kind"].upper()], _ts_from_json(d["ts"]),
                            d.get("value", 0.0))
    if t == "stats_sample":
        return StatsSample(d["topic"], _ts_from_json(d["ts"]), d["measured_hz"],
                           p50_ms=d["p50_ms"], p99_ms=d["p99_ms"],
                           dropped=int(d["dropped"]), has_latency=bool(d["has_latency"]))
    raise UnknownPayloadKind(str(t))
