"""Synthetic hand-pose sources.

A script is a callable (tick, t_seconds) -> PoseSpec describing where the
synthetic hand is at that instant. Frames carry script-derived timestamps
(tick / rate), so two runs of the same script produce byte-identical
payload sequences; envelope timestamps still reflect real publish time.
"""

import threading
from dataclasses import dataclass

import numpy as np

from ..errors import BadScript
from ..hands import make_frame
from ..wire.messages import Hand, Timestamp
from .rate import RateLimiter

SCRIPT_WALL_BASE_US = 1_000_000_000  # fixed epoch for synthetic sample times


@dataclass(frozen=True)
class PoseSpec:
    wrist: tuple = (0.0, 0.0, 0.0)
    rotation: object = None          # 3x3 or None
    curls: object = None             # 5 scalars in [0, 1] or None
    pinch: object = None             # None | "pinky" | "index"


def constant_pose(wrist=(0.0, 0.0, 0.0), curls=None, pinch=None):
    spec = PoseSpec(wrist=tuple(wrist), curls=curls, pinch=pinch)
    return lambda k, t: spec


def circle_orbit(radius=0.1, orbit_hz=0.5, center=(0.0, 0.0, 0.0)):
    """Wrist circles in the x-y plane; analytic, exact at every sample."""
    center = np.asarray(center, dtype=float)

    def script(k, t):
        phase = 2.0 * np.pi * orbit_hz * t
        wrist = center + np.array([radius * np.cos(phase), radius * np.sin(phase), 0.0])
        return PoseSpec(wrist=tuple(wrist))

    return script


def waypoint_script(waypoints):
    """Piecewise-linear wrist path through [(t, (x, y, z)), ...]."""
    if not waypoints:
        raise BadScript("empty waypoint list")
    times = np.array([w[0] for w in waypoints], dtype=float)
    points = np.array([w[1] for w in waypoints], dtype=float)
    if np.any(np.diff(times) <= 0.0):
        raise BadScript("waypoint times must be strictly increasing")

    def script(k, t):
        x = np.interp(t, times, points[:, 0])
        y = np.interp(t, times, points[:, 1])
        z = np.interp(t, times, points[:, 2])
        return PoseSpec(wrist=(float(x), float(y), float(z)))

    return script


def script_timestamp(k, hz):
    period_ns = int(round(1e9 / hz))
    mono = k * period_ns
    return Timestamp(mono, SCRIPT_WALL_BASE_US + mono // 1000)


def script_frame(script, k, hz, hand=Hand.RIGHT):
    """Materialize the script at tick k as a HandFrame."""
    spec = script(k, k / hz)
    try:
        return make_frame(ts=script_timestamp(k, hz), wrist=spec.wrist,
                          rotation=spec.rotation, curls=spec.curls,
                          pinch=spec.pinch, hand=hand)
    except (ValueError, TypeError) as e:
        raise BadScript(f"script produced an invalid pose at tick {k}: {e}") from e


class SynthHandSource:
    """Publishes scripted frames on the bus at a fixed rate (own thread)."""

    def __init__(self, bus, topic, script, hz, hand=Hand.RIGHT):
        self.bus = bus
        self.topic = topic
        self.script = script
        self.hz = float(hz)
        self.hand = hand
        self.frames_published = 0
        self._stop = threading.Event()
        self._thread = None
        self.limiter = None

    def start(self):
        self._stop.clear()
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()
        return self

    def _run(self):
        self.limiter = RateLimiter(self.hz)
        k = 0
        while not self._stop.is_set():
            self.limiter.wait()
            frame = script_frame(self.script, k, self.hz, self.hand)
            self.bus.publish(self.topic, frame)
            self.frames_published += 1
            k += 1

    def stop(self):
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)
            self._thread = None
