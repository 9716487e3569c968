"""Broker-less in-process topic bus.

Publishers never block on consumers: delivery is an O(1) enqueue per
subscription, and each subscription applies its own loss policy (bounded
drop-oldest queue or keep-latest conflation) so a stalled reader only loses
its own messages.
"""

import threading
from collections import deque

from ..errors import BusClosed, KindMismatch, UnknownTopic
from .messages import Envelope, PolicyMode, Timestamp, TopicPolicy


class Subscription:
    """One subscriber's view of a topic.

    ``recv`` blocks up to ``timeout`` for the next message, ``poll`` never
    blocks. Conflating subscriptions hand out the most recently published
    message once; queued subscriptions deliver FIFO and count what the bound
    evicted in ``dropped``.
    """

    def __init__(self, topic, policy):
        self.topic = topic
        self.policy = policy
        self.dropped = 0
        self.last_seq = -1
        self._cond = threading.Condition()
        self._closed = False
        if policy.mode == PolicyMode.QUEUE:
            self._queue = deque()
        else:
            self._latest = None
            self._fresh = False

    def _offer(self, env):
        with self._cond:
            if self._closed:
                return
            if self.policy.mode == PolicyMode.QUEUE:
                if len(self._queue) >= self.policy.bound:
                    self._queue.popleft()
                    self.dropped += 1
                self._queue.append(env)
            else:
                if self._fresh:
                    self.dropped += 1
                self._latest = env
                self._fresh = True
            self._cond.notify()

    def poll(self):
        with self._cond:
            return self._take()

    def recv(self, timeout=None):
        with self._cond:
            if not self._available():
                self._cond.wait_for(lambda: self._available() or self._closed, timeout)
            return self._take()

    def drain(self):
        """Return every queued message (at most one when conflating)."""
        out = []
        with self._cond:
            while True:
                env = self._take()
                if env is None:
                    return out
                out.append(env)

    def _available(self):
        if self.policy.mode == PolicyMode.QUEUE:
            return bool(self._queue)
        return self._fresh

    def _take(self):
        if self.policy.mode == PolicyMode.QUEUE:
            env = self._queue.popleft() if self._queue else None
        elif self._fresh:
            env, self._fresh = self._latest, False
        else:
            env = None
        if env is not None:
            self.last_seq = env.seq
        return env

    def close(self):
        with self._cond:
            self._closed = True
            self._cond.notify_all()

    def __iter__(self):
        while True:
            env = self.recv()
            if env is None and self._closed and not self._available():
                return
            if env is not None:
                yield env


class _Topic:
    __slots__ = ("kind", "default_policy", "next_seq", "subs")

    def __init__(self, kind, default_policy):
        self.kind = kind
        self.default_policy = default_policy
        self.next_seq = 0
        self.subs = []


class Bus:
    """Topic registry plus fan-out. Safe to share across threads."""

    def __init__(self):
        self._topics = {}
        self._lock = threading.Lock()
        self._closed = False

    def register(self, topic, kind, default_policy=None):
        if default_policy is None:
            default_policy = TopicPolicy.conflate()
        with self._lock:
            if topic not in self._topics:
                self._topics[topic] = _Topic(kind, default_policy)
        return self

    def topics(self):
        with self._lock:
            return {name: t.kind for name, t in self._topics.items()}

    def kind_of(self, topic):
        with self._lock:
            t = self._topics.get(topic)
        if t is None:
            raise UnknownTopic(topic)
        return t.kind

    def publish(self, topic, payload, ts=None):
        """Deliver ``payload`` to all current subscribers; returns the seq."""
        with self._lock:
            if self._closed:
                raise BusClosed("publish on closed bus")
            t = self._topics.get(topic)
            if t is None:
                raise UnknownTopic(topic)
            if not isinstance(payload, t.kind):
                raise KindMismatch(
                    f"topic {topic!r} carries {t.kind.__name__}, got {type(payload).__name__}"
                )
            seq = t.next_seq
            t.next_seq += 1
            subs = list(t.subs)
        env = Envelope(topic=topic, seq=seq, ts=ts or Timestamp.now(), payload=payload)
        for sub in subs:
            sub._offer(env)
        return seq

    def subscribe(self, topic, policy=None):
        with self._lock:
            if self._closed:
                raise BusClosed("subscribe on closed bus")
            t = self._topics.get(topic)
            if t is None:
                raise UnknownTopic(topic)
            sub = Subscription(topic, policy or t.default_policy)
            t.subs.append(sub)
        return sub

    def unsubscribe(self, sub):
        with self._lock:
            t = self._topics.get(sub.topic)
            if t is not None and sub in t.subs:
                t.subs.remove(sub)
        sub.close()

    def close(self):
        with self._lock:
            self._closed = True
            subs = [s for t in self._topics.values() for s in t.subs]
        for s in subs:
            s.close()

    @property
    def closed(self):
        return self._closed
