"""Pipeline health measurement.

The probe taps the hand and state topics, matches each published state back
to the hand frame that produced it through the echoed seq, and emits a
StatsSample once a second: measured rate, end-to-end latency percentiles
(hand ingress to state egress, envelope clocks), and drop counts from seq
gaps.
"""

import threading
from collections import OrderedDict

import numpy as np

from ..wire.messages import StatsSample, Timestamp, TopicPolicy


def percentile(values, pct):
    if len(values) == 0:
        return 0.0
    return float(np.percentile(np.asarray(values, dtype=float), pct))


class LatencyProbe:
    """Collects per-message latencies and per-second stats samples."""

    def __init__(self, bus, hand_topic="hand/frames", state_topic="robot/state",
                 stats_topic="stats", window_s=1.0, publish=True, max_pending=16384):
        self.bus = bus
        self.state_topic = state_topic
        self.stats_topic = stats_topic if publish else None
        self.window_s = window_s
        self.max_pending = max_pending
        self._hand_sub = bus.subscribe(hand_topic, TopicPolicy.queue(16384))
        self._state_sub = bus.subscribe(state_topic, TopicPolicy.queue(16384))
        self._ingress = OrderedDict()   # hand seq -> envelope mono_ns
        self.latencies_ms = []
        self.samples = []
        self.state_count = 0
        self._last_state_seq = -1
        self._gap_drops = 0
        self._stop = threading.Event()
        self._thread = None

    def start(self):
        self._stop.clear()
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()
        return self

    def _run(self):
        window_start = None
        window_latencies = []
        window_states = 0
        while not self._stop.is_set():
            env = self._state_sub.recv(timeout=0.02)
            self._drain_hand()
            now = Timestamp.now()
            if window_start is None:
                window_start = now.mono_ns
            if env is not None:
                self.state_count += 1
                window_states += 1
                if self._last_state_seq >= 0 and env.seq > self._last_state_seq + 1:
                    self._gap_drops += env.seq - self._last_state_seq - 1
                self._last_state_seq = env.seq
                src = env.payload.src_seq
                t_in = self._ingress.get(src)
                if t_in is not None:
                    ms = (env.ts.mono_ns - t_in) * 1e-6
                    self.latencies_ms.append(ms)
                    window_latencies.append(ms)
            if (now.mono_ns - window_start) * 1e-9 >= self.window_s:
                self._emit(now, window_states, window_latencies)
                window_start = now.mono_ns
                window_states = 0
                window_latencies = []

    def _drain_hand(self):
        while True:
            env = self._hand_sub.poll()
            if env is None:
                return
            self._ingress[env.seq] = env.ts.mono_ns
            while len(self._ingress) > self.max_pending:
                self._ingress.popitem(last=False)

    def _emit(self, now, states, latencies):
        sample = StatsSample(
            topic=self.state_topic, ts=now,
            measured_hz=states / self.window_s,
            p50_ms=percentile(latencies, 50),
            p99_ms=percentile(latencies, 99),
            dropped=self._gap_drops + self._state_sub.dropped,
            has_latency=len(latencies) > 0,
        )
        self.samples.append(sample)
        if self.stats_topic is not None:
            self.bus.publish(self.stats_topic, sample)

    def stop(self):
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)
            self._thread = None
        # pick up anything still queued
        self._drain_hand()
        while True:
            env = self._state_sub.poll()
            if env is None:
                break
            self.state_count += 1
            t_in = self._ingress.get(env.payload.src_seq)
            if t_in is not None:
                self.latencies_ms.append((env.ts.mono_ns - t_in) * 1e-6)
        self.bus.unsubscribe(self._hand_sub)
        self.bus.unsubscribe(self._state_sub)
        return self

    def summary(self):
        return {
            "states": self.state_count,
            "latency_count": len(self.latencies_ms),
            "p50_ms": percentile(self.latencies_ms, 50),
            "p99_ms": percentile(self.latencies_ms, 99),
            "dropped": self._gap_drops,
        }
