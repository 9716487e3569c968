"""Wiring: build a full pipeline from a config and run or benchmark it."""

import logging
import threading

import numpy as np

from .config import RATE_PRESETS, PipelineConfig, build_bus, build_env
from .gateway import Gateway
from .loop import TeleopLoop
from .source import SynthHandSource, circle_orbit, constant_pose
from .stats import LatencyProbe, percentile

log = logging.getLogger(__name__)


def make_script(cfg):
    if cfg.synth_script == "circle":
        return circle_orbit(radius=cfg.synth_radius, orbit_hz=cfg.synth_orbit_hz)
    if cfg.synth_script == "constant":
        return constant_pose()
    raise ValueError(f"unknown synth script {cfg.synth_script!r}")


def run_teleop_loop(cfg, duration_s=None, stop_event=None, probe=True):
    """Run the configured pipeline until stopped; returns a summary dict.

    source "synth" publishes the scripted hand; "console" starts the
    WebSocket gateway and waits for an operator.
    """
    bus = build_bus(cfg)
    env = build_env(cfg)
    loop = TeleopLoop(bus, env, cfg.loop_config())
    stop_event = stop_event or threading.Event()

    prober = None
    if probe:
        prober = LatencyProbe(bus, cfg.topics.hand, cfg.topics.state,
                              cfg.topics.stats).start()
    source = None
    gateway = None
    server = None
    try:
        if cfg.bus_endpoint is not None:
            from ..wire.tcp import BusServer
            server = BusServer(bus, cfg.bus_endpoint[0], cfg.bus_endpoint[1])
            log.info("bus TCP egress on %s:%d", *server.address)
        if cfg.source == "synth":
            source = SynthHandSource(bus, cfg.topics.hand, make_script(cfg),
                                     cfg.rate_hz).start()
        elif cfg.source == "console":
            gateway = Gateway(bus, cfg.topics, cfg.gateway_host, cfg.gateway_port,
                              cfg.gateway_update_hz,
                              robot_model=getattr(env, "model", None),
                              robot_kind=cfg.robot).start()
            log.info("gateway listening on %s", gateway.url)
        else:
            raise ValueError(f"unknown source {cfg.source!r}")
        loop.run(duration_s=duration_s, stop_event=stop_event)
    finally:
        if source is not None:
            source.stop()
        if gateway is not None:
            gateway.stop()
        if prober is not None:
            prober.stop()
        if server is not None:
            server.close()
        bus.close()

    return summarize_run(cfg, loop, source, prober)


def summarize_run(cfg, loop, source, prober):
    out = {
        "robot": cfg.robot,
        "target_hz": cfg.rate_hz,
        "ticks": loop.ticks,
        "stale_ticks": loop.stale_ticks,
        "commands": loop.commands_sent,
    }
    if loop.limiter is not None:
        out["elapsed_s"] = loop.limiter.elapsed
        out["tick_hz"] = loop.limiter.measured_hz()
        out["overruns"] = loop.limiter.overruns
        out["skipped"] = loop.limiter.skipped
        if loop.limiter.lateness:
            out["jitter_p99_ms"] = percentile(
                np.abs(loop.limiter.lateness) * 1e3, 99)
    if source is not None and source.limiter is not None:
        out["frames_published"] = source.frames_published
        out["source_hz"] = source.limiter.measured_hz()
    if prober is not None:
        out.update({"states": prober.state_count,
                    "latency_p50_ms": prober.summary()["p50_ms"],
                    "latency_p99_ms": prober.summary()["p99_ms"]})
    return out


def bench(preset="90hz", secs=10.0, robot="arm", kinematic=True):
    """Timed rate/latency benchmark on the in-process loopback pipeline."""
    hz = RATE_PRESETS.get(preset)
    if hz is None:
        hz = float(preset.rstrip("hz"))
    cfg = PipelineConfig.from_dict({
        "pipeline": {"robot": robot, "rate_hz": hz, "kinematic": kinematic,
                     "source": "synth"},
    })
    return run_teleop_loop(cfg, duration_s=secs)
