"""Closed-loop policy evaluation in the simulated environments, plus a
single-file container for trained policies."""

import json
import struct

import numpy as np

from ..errors import DimensionMismatch, IoFailure, SchemaVersionMismatch
from ..wire.messages import CommandKind, RobotCommand, Timestamp
from .knn import KnnPolicy
from .linear import LinearPolicy

POLICY_MAGIC = b"OTPL"
POLICY_VERSION = 1


def observation_from_state(state):
    """Must mirror the recorder's arm observation layout."""
    return np.concatenate([state.q, state.ee_position,
                           [float(state.gripper_closed)]])


def policy_action(policy, obs):
    from .knn import knn_act
    if isinstance(policy, KnnPolicy):
        return knn_act(policy, obs)
    return policy.act(obs)


def evaluate(env, policy, episodes, success, steps=240, rate_hz=30.0):
    """Roll the policy out closed-loop from each episode's initial joints.

    Returns (success count, per-episode ee traces). Deterministic given the
    env, policy, and episode initializations.
    """
    dt = 1.0 / rate_hz
    _, home_quat = env.home_pose()
    successes = 0
    traces = []
    for q0 in episodes:
        env.reset()
        env.js = type(env.js)(np.asarray(q0, dtype=float),
                              np.zeros(env.model.njoints), env.js.ts)
        env.q_target = np.asarray(q0, dtype=float).copy()
        trace = []
        state = env.state()
        for _ in range(steps):
            obs = observation_from_state(state)
            if obs.shape[0] != policy.obs_dim:
                raise DimensionMismatch(
                    f"policy expects obs dim {policy.obs_dim}, env provides {obs.shape[0]}")
            action = policy_action(policy, obs)
            cmd = RobotCommand(
                CommandKind.ARM_TARGET, Timestamp.now(),
                position=state.ee_position + action[:3],
                orientation=home_quat)
            state = env.step(cmd, dt)
            trace.append(state.ee_position.copy())
        if success(state):
            successes += 1
        traces.append(np.array(trace))
    return successes, traces


def replay_actions(env, demo, rate_hz=30.0):
    """Apply a demonstration's actions open-loop; returns the final state.

    Row k's action is the transition from state k to state k+1, so the
    n - 1 transitions between the n recorded states are replayed and the
    result lands on the recorded final state.
    """
    dt = 1.0 / rate_hz
    _, home_quat = env.home_pose()
    state = env.state()
    for i in range(max(0, len(demo) - 1)):
        action = demo.act[i]
        cmd = RobotCommand(
            CommandKind.ARM_TARGET, Timestamp.now(),
            position=state.ee_position + action[:3], orientation=home_quat)
        state = env.step(cmd, dt)
    return state


def save_policy(policy, path):
    if isinstance(policy, LinearPolicy):
        header = {"version": POLICY_VERSION, "algo": "linear",
                  "ridge": policy.ridge, "obs_dim": policy.obs_dim,
                  "act_dim": policy.act_dim}
        arrays = [policy.W, policy.b]
    elif isinstance(policy, KnnPolicy):
        header = {"version": POLICY_VERSION, "algo": "knn", "k": policy.k,
                  "n": len(policy.obs), "obs_dim": policy.obs_dim,
                  "act_dim": policy.act_dim}
        arrays = [policy.obs, policy.act]
    else:
        raise TypeError(f"cannot save policy of type {type(policy).__name__}")
    blob = json.dumps(header).encode("utf-8")
    try:
        with open(path, "wb") as fh:
            fh.write(POLICY_MAGIC)
            fh.write(struct.pack("<I", len(blob)))
            fh.write(blob)
            for arr in arrays:
                fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e
    return path


def load_policy(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    if data[:4] != POLICY_MAGIC:
        raise IoFailure(f"{path} is not a policy file")
    (hlen,) = struct.unpack_from("<I", data, 4)
    header = json.loads(data[8:8 + hlen].decode("utf-8"))
    if header.get("version") != POLICY_VERSION:
        raise SchemaVersionMismatch(
            f"{path} has policy version {header.get('version')}, expected {POLICY_VERSION}")
    off = 8 + hlen
    od, ad = header["obs_dim"], header["act_dim"]

    def take(rows, cols):
        nonlocal off
        nbytes = rows * cols * 8
        arr = np.frombuffer(data[off:off + nbytes], dtype="<f8").copy()
        off += nbytes
        return arr.reshape(rows, cols)

    if header["algo"] == "linear":
        W = take(ad, od)
        b = take(1, ad)[0]
        return LinearPolicy(W, b, ridge=header["ridge"])
    if header["algo"] == "knn":
        n = header["n"]
        obs = take(n, od)
        act = take(n, ad)
        return KnnPolicy(obs, act, k=header["k"])
    raise IoFailure(f"unknown policy algo {header['algo']!r}")
