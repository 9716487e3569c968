"""Binary framing for envelopes.

Frame layout, all little-endian:

    magic "OTCH" | u8 version | u8 payload kind | u16 topic len | topic bytes
    | u64 seq | u64 mono_ns | u64 wall_us | u32 payload len | payload

The payload encoding is fixed per kind, so ``decode(encode(e)) == e``
bit-exactly and two encodes of the same envelope are identical byte strings.
"""

import struct

import numpy as np

from ..errors import (
    MalformedFrame,
    PayloadTooLarge,
    TopicTooLong,
    UnknownPayloadKind,
)
from .messages import (
    CommandKind,
    ControlEvent,
    ControlEventKind,
    Envelope,
    Hand,
    HandFrame,
    RobotCommand,
    RobotState,
    StatsSample,
    Timestamp,
)

MAGIC = b"OTCH"
VERSION = 1
MAX_TOPIC_BYTES = 64
MAX_PAYLOAD_BYTES = 16 * 1024 * 1024

KIND_HAND_FRAME = 1
KIND_ROBOT_COMMAND = 2
KIND_ROBOT_STATE = 3
KIND_CONTROL_EVENT = 4
KIND_STATS_SAMPLE = 5

PAYLOAD_KIND_IDS = {
    HandFrame: KIND_HAND_FRAME,
    RobotCommand: KIND_ROBOT_COMMAND,
    RobotState: KIND_ROBOT_STATE,
    ControlEvent: KIND_CONTROL_EVENT,
    StatsSample: KIND_STATS_SAMPLE,
}

_HEAD = struct.Struct("<4sBBH")          # magic, version, kind, topic len
_MID = struct.Struct("<QQQI")            # seq, mono_ns, wall_us, payload len
_TS = struct.Struct("<QQ")


def payload_kind(payload):
    try:
        return PAYLOAD_KIND_IDS[type(payload)]
    except KeyError:
        raise UnknownPayloadKind(f"unsupported payload type {type(payload).__name__}")


def encode(env: Envelope) -> bytes:
    topic = env.topic.encode("utf-8")
    if len(topic) > MAX_TOPIC_BYTES:
        raise TopicTooLong(f"topic is {len(topic)} bytes, limit {MAX_TOPIC_BYTES}")
    kind = payload_kind(env.payload)
    body = _encode_payload(kind, env.payload)
    if len(body) > MAX_PAYLOAD_BYTES:
        raise PayloadTooLarge(f"payload is {len(body)} bytes")
    return b"".join((
        _HEAD.pack(MAGIC, VERSION, kind, len(topic)),
        topic,
        _MID.pack(env.seq, env.ts.mono_ns, env.ts.wall_us, len(body)),
        body,
    ))


def decode(b: bytes) -> Envelope:
    env, used = _decode_prefix(b)
    if used != len(b):
        raise MalformedFrame(f"{len(b) - used} trailing bytes")
    return env


def _decode_prefix(b):
    """Decode one frame from the head of ``b``; return (envelope, bytes used)."""
    if len(b) < _HEAD.size:
        raise MalformedFrame("truncated header")
    magic, version, kind, topic_len = _HEAD.unpack_from(b, 0)
    if magic != MAGIC:
        raise MalformedFrame("bad magic")
    if version != VERSION:
        raise MalformedFrame(f"unsupported version {version}")
    off = _HEAD.size
    if len(b) < off + topic_len + _MID.size:
        raise MalformedFrame("truncated topic or mid section")
    try:
        topic = b[off:off + topic_len].decode("utf-8")
    except UnicodeDecodeError as e:
        raise MalformedFrame("topic is not UTF-8") from e
    off += topic_len
    seq, mono_ns, wall_us, payload_len = _MID.unpack_from(b, off)
    off += _MID.size
    if payload_len > MAX_PAYLOAD_BYTES:
        raise MalformedFrame(f"declared payload length {payload_len} too large")
    if len(b) < off + payload_len:
        raise MalformedFrame("truncated payload")
    payload = _decode_payload(kind, b[off:off + payload_len])
    off += payload_len
    return Envelope(topic=topic, seq=seq, ts=Timestamp(mono_ns, wall_us), payload=payload), off


class FrameStreamDecoder:
    """Incremental decoder for a byte stream of concatenated frames."""

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data):
        self._buf.extend(data)
        out = []
        while True:
            need = self._frame_size()
            if need is None or len(self._buf) < need:
                break
            env, used = _decode_prefix(bytes(self._buf[:need]))
            del self._buf[:used]
            out.append(env)
        return out

    def _frame_size(self):
        if len(self._buf) < _HEAD.size:
            return None
        magic, version, _, topic_len = _HEAD.unpack_from(self._buf, 0)
        if magic != MAGIC:
            raise MalformedFrame("bad magic in stream")
        mid_at = _HEAD.size + topic_len
        if len(self._buf) < mid_at + _MID.size:
            return None
        payload_len = _MID.unpack_from(self._buf, mid_at)[3]
        if payload_len > MAX_PAYLOAD_BYTES:
            raise MalformedFrame(f"declared payload length {payload_len} too large")
        return mid_at + _MID.size + payload_len


# --- payload codecs -------------------------------------------------------

def _pack_vec(v):
    a = np.ascontiguousarray(v, dtype="<f8")
    return a.tobytes()


def _unpack_vec(b, off, n):
    end = off + 8 * n
    if end > len(b):
        raise MalformedFrame("truncated vector")
    return np.frombuffer(b[off:end], dtype="<f8").copy(), end


def _encode_payload(kind, p):
    if kind == KIND_HAND_FRAME:
        return b"".join((
            _TS.pack(p.ts.mono_ns, p.ts.wall_us),
            struct.pack("<B", int(p.hand)),
            _pack_vec(p.keypoints),
            struct.pack("<d", p.confidence),
        ))
    if kind == KIND_ROBOT_COMMAND:
        head = _TS.pack(p.ts.mono_ns, p.ts.wall_us) + struct.pack("<qB", p.src_seq, int(p.kind))
        if p.kind == CommandKind.ARM_TARGET:
            return head + _pack_vec(p.position) + _pack_vec(p.orientation)
        if p.kind == CommandKind.HAND_JOINTS:
            return head + struct.pack("<H", len(p.joints)) + _pack_vec(p.joints)
        if p.kind == CommandKind.MOBILE_TARGET:
            return head + struct.pack(
                "<ddd", p.base_lateral_velocity, p.lift_height, p.arm_extension
            ) + _pack_vec(p.wrist_orientation) + struct.pack("<B", p.gripper_toggle)
        return head  # GRIPPER_TOGGLE carries no body
    if kind == KIND_ROBOT_STATE:
        return b"".join((
            _TS.pack(p.ts.mono_ns, p.ts.wall_us),
            struct.pack("<qH", p.src_seq, len(p.q)),
            _pack_vec(p.q),
            _pack_vec(p.qd),
            _pack_vec(p.ee_position),
            _pack_vec(p.ee_orientation),
            struct.pack("<B", p.gripper_closed),
            _pack_vec(p.base_pose),
            struct.pack("<dd", p.lift_height, p.arm_extension),
        ))
    if kind == KIND_CONTROL_EVENT:
        return _TS.pack(p.ts.mono_ns, p.ts.wall_us) + struct.pack("<Bd", int(p.kind), p.value)
    if kind == KIND_STATS_SAMPLE:
        topic = p.topic.encode("utf-8")
        return b"".join((
            _TS.pack(p.ts.mono_ns, p.ts.wall_us),
            struct.pack("<H", len(topic)),
            topic,
            struct.pack("<dddQB", p.measured_hz, p.p50_ms, p.p99_ms, p.dropped, p.has_latency),
        ))
    raise UnknownPayloadKind(f"kind id {kind}")


def _decode_payload(kind, b):
    try:
        return _decode_payload_inner(kind, b)
    except UnknownPayloadKind:
        raise
    except MalformedFrame:
        raise
    except (struct.error, ValueError, IndexError) as e:
        raise MalformedFrame(f"bad payload body: {e}") from e


def _decode_payload_inner(kind, b):
    if kind == KIND_HAND_FRAME:
        mono, wall = _TS.unpack_from(b, 0)
        hand = struct.unpack_from("<B", b, 16)[0]
        kp, off = _unpack_vec(b, 17, 63)
        conf = struct.unpack_from("<d", b, off)[0]
        return HandFrame(Timestamp(mono, wall), Hand(hand), kp.reshape(21, 3), conf)
    if kind == KIND_ROBOT_COMMAND:
        mono, wall = _TS.unpack_from(b, 0)
        src_seq, ckind = struct.unpack_from("<qB", b, 16)
        ts = Timestamp(mono, wall)
        ckind = CommandKind(ckind)
        off = 25
        if ckind == CommandKind.ARM_TARGET:
            pos, off = _unpack_vec(b, off, 3)
            quat, off = _unpack_vec(b, off, 4)
            return RobotCommand(ckind, ts, src_seq, position=pos, orientation=quat)
        if ckind == CommandKind.HAND_JOINTS:
            n = struct.unpack_from("<H", b, off)[0]
            joints, off = _unpack_vec(b, off + 2, n)
            return RobotCommand(ckind, ts, src_seq, joints=joints)
        if ckind == CommandKind.MOBILE_TARGET:
            lat, lift, ext = struct.unpack_from("<ddd", b, off)
            quat, off = _unpack_vec(b, off + 24, 4)
            toggle = struct.unpack_from("<B", b, off)[0]
            return RobotCommand(
                ckind, ts, src_seq,
                base_lateral_velocity=lat, lift_height=lift, arm_extension=ext,
                wrist_orientation=quat, gripper_toggle=bool(toggle),
            )
        return RobotCommand(ckind, ts, src_seq)
    if kind == KIND_ROBOT_STATE:
        mono, wall = _TS.unpack_from(b, 0)
        src_seq, nq = struct.unpack_from("<qH", b, 16)
        off = 26
        q, off = _unpack_vec(b, off, nq)
        qd, off = _unpack_vec(b, off, nq)
        ee_pos, off = _unpack_vec(b, off, 3)
        ee_quat, off = _unpack_vec(b, off, 4)
        gripper = struct.unpack_from("<B", b, off)[0]
        base, off = _unpack_vec(b, off + 1, 3)
        lift, ext = struct.unpack_from("<dd", b, off)
        return RobotState(
            Timestamp(mono, wall), q, qd, ee_pos, ee_quat,
            gripper_closed=bool(gripper), base_pose=base,
            lift_height=lift, arm_extension=ext, src_seq=src_seq,
        )
    if kind == KIND_CONTROL_EVENT:
        mono, wall = _TS.unpack_from(b, 0)
        ek, value = struct.unpack_from("<Bd", b, 16)
        return ControlEvent(ControlEventKind(ek), Timestamp(mono, wall), value)
    if kind == KIND_STATS_SAMPLE:
        mono, wall = _TS.unpack_from(b, 0)
        tlen = struct.unpack_from("<H", b, 16)[0]
        topic = b[18:18 + tlen].decode("utf-8")
        hz, p50, p99, dropped, has_lat = struct.unpack_from("<dddQB", b, 18 + tlen)
        return StatsSample(
            topic, Timestamp(mono, wall), hz,
            p50_ms=p50, p99_ms=p99, dropped=dropped, has_latency=bool(has_lat),
        )
    raise UnknownPayloadKind(f"kind id {kind}")
