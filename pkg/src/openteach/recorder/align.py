"""Timestamp alignment: compile per-topic logs into a demonstration.

For every sample of the primary stream, each secondary stream contributes
its nearest-in-time sample; the step survives only if every match lands
within the tolerance. A secondary sample may serve several primary samples
(nearest-match, no uniqueness constraint). Output order follows the
primary stream.
"""

import numpy as np

from ..errors import EmptyPrimary
from ..wire.messages import CommandKind, RobotCommand, RobotState
from .dataset import Demonstration


def nearest_indices(primary_ts, secondary_ts):
    """Index into secondary_ts of the closest time for each primary time.
    Both arrays must be sorted ascending (they are: log order)."""
    secondary_ts = np.asarray(secondary_ts, dtype=np.int64)
    primary_ts = np.asarray(primary_ts, dtype=np.int64)
    pos = np.searchsorted(secondary_ts, primary_ts)
    pos = np.clip(pos, 1, len(secondary_ts) - 1) if len(secondary_ts) > 1 \
        else np.zeros(len(primary_ts), dtype=int)
    left = secondary_ts[pos - 1] if len(secondary_ts) > 1 else secondary_ts[pos]
    right = secondary_ts[pos]
    take_left = np.abs(primary_ts - left) <= np.abs(right - primary_ts)
    return np.where(take_left, pos - 1, pos) if len(secondary_ts) > 1 else pos


def default_half_period_tolerance(logs):
    """Half the median period of the slowest stream, in seconds."""
    slowest = np.inf
    for log in logs.values():
        ts = np.array([t.mono_ns for t, _, _ in log.samples], dtype=np.int64)
        if len(ts) < 2:
            continue
        rate = 1e9 / np.median(np.diff(ts))
        slowest = min(slowest, rate)
    if not np.isfinite(slowest) or slowest <= 0:
        raise EmptyPrimary("cannot infer a tolerance from the logs")
    return 0.5 / slowest


def align(logs, primary_topic, tolerance_s, features=None, metadata=None,
          offsets=None):
    """Compile logs into a Demonstration.

    logs: {topic: StreamLog}. features: callable(primary_payload,
    {topic: payload}) -> (obs, act); defaults to arm features (state q,
    ee position and gripper bit against the commanded ee delta and toggle
    bit). offsets: {topic: seconds} added to that stream's timestamps
    before matching; a command stream recorded one tick after the state it
    was issued from pairs correctly with offset -period (action lookahead).
    Match/drop counts land in the metadata.
    """
    if primary_topic not in logs or not logs[primary_topic].samples:
        raise EmptyPrimary(f"no samples on primary topic {primary_topic!r}")
    if tolerance_s <= 0:
        raise ValueError("tolerance must be > 0")
    features = features or arm_features
    offsets = offsets or {}

    primary = logs[primary_topic].samples
    primary_ts = np.array([ts.mono_ns for ts, _, _ in primary], dtype=np.int64)
    others = {t: log for t, log in logs.items() if t != primary_topic}

    matches = {}
    for topic, log in others.items():
        if not log.samples:
            matches[topic] = None
            continue
        shift = int(offsets.get(topic, 0.0) * 1e9)
        sec_ts = np.array([ts.mono_ns + shift for ts, _, _ in log.samples],
                          dtype=np.int64)
        idx = nearest_indices(primary_ts, sec_ts)
        dt_ns = np.abs(sec_ts[idx] - primary_ts)
        matches[topic] = (idx, dt_ns)

    tol_ns = int(tolerance_s * 1e9)
    obs_rows, act_rows, kept_mono, kept_wall = [], [], [], []
    dropped = 0
    for i, (ts, payload, _) in enumerate(primary):
        row = {}
        ok = True
        for topic, match in matches.items():
            if match is None or match[1][i] > tol_ns:
                ok = False
                break
            row[topic] = others[topic].samples[match[0][i]][1]
        if not ok:
            dropped += 1
            continue
        obs, act = features(payload, row)
        obs_rows.append(obs)
        act_rows.append(act)
        kept_mono.append(ts.mono_ns)
        kept_wall.append(ts.wall_us)

    meta = dict(metadata or {})
    meta.update({
        "primary_topic": primary_topic,
        "tolerance_s": tolerance_s,
        "kept": len(obs_rows),
        "dropped": dropped,
    })
    if not obs_rows:
        return Demonstration(np.zeros((0, 0)), np.zeros((0, 0)), [], [], meta)
    return Demonstration(np.array(obs_rows), np.array(act_rows),
                         kept_mono, kept_wall, meta)


def arm_features(state, matched):
    """Observation: q + ee position + gripper bit. Action: commanded ee
    position delta from the current ee + gripper toggle bit."""
    if not isinstance(state, RobotState):
        raise TypeError("arm features expect a RobotState primary stream")
    obs = np.concatenate([state.q, state.ee_position, [float(state.gripper_closed)]])
    cmd = next((p for p in matched.values() if isinstance(p, RobotCommand)), None)
    if cmd is None or cmd.kind != CommandKind.ARM_TARGET or cmd.position is None:
        act = np.zeros(4)
    else:
        act = np.concatenate([cmd.position - state.ee_position,
                              [float(cmd.kind == CommandKind.GRIPPER_TOGGLE)]])
    return obs, act
