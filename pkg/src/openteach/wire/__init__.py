from .bus import Bus, Subscription
from .framing import FrameStreamDecoder, decode, encode
from .messages import (
    FINGERS,
    NUM_KEYPOINTS,
    WRIST,
    CommandKind,
    ControlEvent,
    ControlEventKind,
    Envelope,
    Hand,
    HandFrame,
    PolicyMode,
    RobotCommand,
    RobotState,
    StatsSample,
    Timestamp,
    TopicPolicy,
    knuckle_index,
    tip_index,
)
from .tcp import BusServer, connect

__all__ = [
    "Bus", "Subscription", "FrameStreamDecoder", "decode", "encode",
    "FINGERS", "NUM_KEYPOINTS", "WRIST", "CommandKind", "ControlEvent",
    "ControlEventKind", "Envelope", "Hand", "HandFrame", "PolicyMode",
    "RobotCommand", "RobotState", "StatsSample", "Timestamp", "TopicPolicy",
    "knuckle_index", "tip_index", "BusServer", "connect",
]
