"""WebSocket gateway between the operator console and the bus.

Text frames in, text frames out (UTF-8 JSON, schemas frozen in
docs/protocol.md). Inbound "hand" and "control" messages become bus
payloads; outbound robot states and stats are conflated to at most
``update_hz`` per second, always the latest. A schema violation gets an
"error" reply and the connection stays up; a dropped connection pauses the
pipeline as a safety default.
"""

import asyncio
import json
import logging
import threading

import numpy as np
import websockets
from websockets.asyncio.server import serve

from ..errors import BadMessage
from ..wire.messages import (
    ControlEvent,
    ControlEventKind,
    Hand,
    HandFrame,
    Timestamp,
    TopicPolicy,
)

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1

_CONTROL_KINDS = {
    "pause": ControlEventKind.PAUSE,
    "resume": ControlEventKind.RESUME,
    "set_resolution": ControlEventKind.SET_RESOLUTION,
    "reset_anchor": ControlEventKind.RESET_ANCHOR,
}


def parse_hand_message(msg):
    try:
        hand = Hand[msg["hand"].upper()]
        keypoints = np.asarray(msg["keypoints"], dtype=float)
        confidence = float(msg.get("confidence", 1.0))
        return HandFrame(ts=Timestamp.now(), hand=hand, keypoints=keypoints,
                         confidence=confidence)
    except (KeyError, TypeError, ValueError) as e:
        raise BadMessage(f"bad hand message: {e}") from e


def parse_control_message(msg):
    try:
        kind = _CONTROL_KINDS[msg["control"]]
        value = float(msg.get("value", 0.0))
        return ControlEvent(kind=kind, ts=Timestamp.now(), value=value)
    except (KeyError, TypeError, ValueError) as e:
        raise BadMessage(f"bad control message: {e}") from e


def state_message(env):
    st = env.payload
    return {
        "kind": "state", "seq": env.seq, "ts_us": st.ts.wall_us,
        "q": st.q.tolist(), "ee_pos": st.ee_position.tolist(),
        "ee_quat": st.ee_orientation.tolist(),
        "gripper_closed": st.gripper_closed, "base": st.base_pose.tolist(),
        "lift": st.lift_height, "extension": st.arm_extension,
    }


def stats_message(env):
    s = env.payload
    return {
        "kind": "stats", "topic": s.topic, "hz": s.measured_hz,
        "p50_ms": s.p50_ms, "p99_ms": s.p99_ms, "dropped": s.dropped,
        "has_latency": s.has_latency,
    }


def model_config_message(model, robot_kind):
    joints = [{"axis": j.axis.tolist(), "link_translation": j.link[:3, 3].tolist()}
              for j in model.joints] if model is not None else []
    tool = model.tool[:3, 3].tolist() if model is not None else [0.0, 0.0, 0.0]
    return {"kind": "config", "protocol": PROTOCOL_VERSION, "robot": robot_kind,
            "joints": joints, "tool_translation": tool}


class Gateway:
    def __init__(self, bus, topics, host="127.0.0.1", port=8765,
                 update_hz=30.0, robot_model=None, robot_kind="arm"):
        self.bus = bus
        self.topics = topics
        self.host = host
        self.port = port
        self.update_hz = update_hz
        self.robot_model = robot_model
        self.robot_kind = robot_kind
        self.clients = set()
        self._loop = None
        self._thread = None
        self._started = threading.Event()
        self._stopping = False

    # -- lifecycle -----------------------------------------------------------

    def start(self):
        self._thread = threading.Thread(target=self._thread_main, daemon=True)
        self._thread.start()
        if not self._started.wait(timeout=10.0):
            raise RuntimeError("gateway failed to start")
        return self

    def _thread_main(self):
        asyncio.run(self._main())

    async def _main(self):
        self._loop = asyncio.get_running_loop()
        self._stop_future = self._loop.create_future()
        async with serve(self._handler, self.host, self.port) as server:
            self.port = server.sockets[0].getsockname()[1]
            broadcaster = asyncio.create_task(self._broadcast())
            self._started.set()
            await self._stop_future
            broadcaster.cancel()

    def stop(self):
        self._stopping = True
        if self._loop is not None:
            def _finish():
                if not self._stop_future.done():
                    self._stop_future.set_result(None)
            self._loop.call_soon_threadsafe(_finish)
        if self._thread is not None:
            self._thread.join(timeout=5.0)
            self._thread = None

    @property
    def url(self):
        return f"ws://{self.host}:{self.port}"

    # -- connection handling ---------------------------------------------------

    async def _handler(self, ws):
        self.clients.add(ws)
        try:
            await ws.send(json.dumps(model_config_message(self.robot_model,
                                                          self.robot_kind)))
            async for raw in ws:
                reply = self._dispatch(raw)
                if reply is not None:
                    await ws.send(json.dumps(reply))
        except websockets.ConnectionClosed:
            pass
        finally:
            self.clients.discard(ws)
            if not self._stopping:
                # operator gone: halt motion until someone resumes
                self.bus.publish(self.topics.control,
                                 ControlEvent(ControlEventKind.PAUSE, Timestamp.now()))
                log.info("console disconnected; pipeline paused")

    def _dispatch(self, raw):
        try:
            msg = json.loads(raw)
            if not isinstance(msg, dict):
                raise BadMessage("message must be a JSON object")
            kind = msg.get("kind")
            if kind == "hand":
                self.bus.publish(self.topics.hand, parse_hand_message(msg))
                return None
            if kind == "control":
                self.bus.publish(self.topics.control, parse_control_message(msg))
                return None
            raise BadMessage(f"unknown message kind {kind!r}")
        except (json.JSONDecodeError, BadMessage, ValueError) as e:
            return {"kind": "error", "reason": str(e)}

    # -- outbound ---------------------------------------------------------------

    async def _broadcast(self):
        state_sub = self.bus.subscribe(self.topics.state, TopicPolicy.conflate())
        stats_sub = self.bus.subscribe(self.topics.stats, TopicPolicy.conflate())
        period = 1.0 / self.update_hz
        try:
            while True:
                await asyncio.sleep(period)
                if not self.clients:
                    continue
                out = []
                env = state_sub.poll()
                if env is not None:
                    out.append(json.dumps(state_message(env)))
                env = stats_sub.poll()
                if env is not None:
                    out.append(json.dumps(stats_message(env)))
                for text in out:
                    websockets.broadcast(self.clients, text)
        finally:
            self.bus.unsubscribe(state_sub)
            self.bus.unsubscribe(stats_sub)
