"""TCP egress for the bus: the publishing process binds, subscribers connect.

A client opens a socket, sends one JSON line naming the topics and policy it
wants, then receives a stream of binary frames (see framing). Each
connection drains its own Subscription in a sender thread, so a slow or
stalled client backs up only its own socket, never the publisher.
"""

import json
import socket
import threading

from ..errors import UnknownTopic
from .bus import Subscription
from .framing import FrameStreamDecoder, encode
from .messages import PolicyMode, TopicPolicy


class BusServer:
    def __init__(self, bus, host="127.0.0.1", port=0):
        self.bus = bus
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, port))
        self._sock.listen()
        self.address = self._sock.getsockname()
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._thread.start()

    def _accept_loop(self):
        while not self._stop.is_set():
            try:
                conn, _ = self._sock.accept()
            except OSError:
                return
            threading.Thread(target=self._serve, args=(conn,), daemon=True).start()

    def _serve(self, conn):
        subs = []
        try:
            request = _read_line(conn)
            spec = json.loads(request)
            policy = _policy_from_json(spec.get("policy"))
            for topic in spec["topics"]:
                subs.append(self.bus.subscribe(topic, policy))
            conn.sendall(b'{"ok": true}\n')
            conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            threads = [
                threading.Thread(target=self._pump, args=(conn, sub), daemon=True)
                for sub in subs
            ]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
        except (UnknownTopic, KeyError, ValueError) as e:
            try:
                conn.sendall(json.dumps({"ok": False, "error": str(e)}).encode() + b"\n")
            except OSError:
                pass
        except OSError:
            pass
        finally:
            for sub in subs:
                self.bus.unsubscribe(sub)
            conn.close()

    def _pump(self, conn, sub):
        while not self._stop.is_set():
            env = sub.recv(timeout=0.25)
            if env is None:
                if self.bus.closed:
                    return
                continue
            try:
                conn.sendall(encode(env))
            except OSError:
                return

    def close(self):
        self._stop.set()
        try:
            self._sock.close()
        except OSError:
            pass


def connect(host, port, topics, policy=None, timeout=5.0):
    """Subscribe to a remote bus; returns a Subscription fed by a reader thread."""
    conn = socket.create_connection((host, port), timeout=timeout)
    request = {"topics": list(topics), "policy": _policy_to_json(policy)}
    conn.sendall(json.dumps(request).encode() + b"\n")
    ack = json.loads(_read_line(conn))
    if not ack.get("ok"):
        conn.close()
        raise UnknownTopic(ack.get("error", "subscription refused"))
    conn.settimeout(0.25)
    # The remote side already applied the requested policy; locally we only
    # buffer what actually arrived.
    local = Subscription("remote", policy or TopicPolicy.queue(1024))
    threading.Thread(target=_reader, args=(conn, local), daemon=True).start()
    return _RemoteHandle(conn, local)


class _RemoteHandle:
    def __init__(self, conn, sub):
        self._conn = conn
        self._sub = sub

    def recv(self, timeout=None):
        return self._sub.recv(timeout)

    def poll(self):
        return self._sub.poll()

    def drain(self):
        return self._sub.drain()

    @property
    def dropped(self):
        return self._sub.dropped

    def close(self):
        self._sub.close()
        try:
            self._conn.close()
        except OSError:
            pass


def _reader(conn, sub):
    decoder = FrameStreamDecoder()
    while True:
        try:
            data = conn.recv(65536)
        except socket.timeout:
            continue
        except OSError:
            break
        if not data:
            break
        for env in decoder.feed(data):
            sub._offer(env)
    sub.close()


def _read_line(conn, limit=65536):
    buf = bytearray()
    while not buf.endswith(b"\n"):
        chunk = conn.recv(1)
        if not chunk:
            raise OSError("connection closed during handshake")
        buf.extend(chunk)
        if len(buf) > limit:
            raise ValueError("handshake line too long")
    return bytes(buf)


def _policy_to_json(policy):
    if policy is None:
        return None
    return {"mode": "queue" if policy.mode == PolicyMode.QUEUE else "conflate",
            "bound": policy.bound}


def _policy_from_json(spec):
    if spec is None:
        return None
    if spec["mode"] == "queue":
        return TopicPolicy.queue(int(spec.get("bound", 16)))
    return TopicPolicy.conflate()
