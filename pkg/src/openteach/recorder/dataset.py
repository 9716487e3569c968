"""Demonstration datasets: timestamp-aligned (observation, action) steps.

Stored as one binary file: magic, a JSON header (schema version, dims,
metadata), then the raw float64/int64 arrays. Loading a file written by a
different schema version fails loudly rather than guessing.
"""

import json
import struct

import numpy as np

from ..errors import IoFailure, SchemaVersionMismatch

MAGIC = b"OTDM"
SCHEMA_VERSION = 1


class Demonstration:
    """Ordered steps of (observation, action, ts) plus free-form metadata."""

    def __init__(self, obs, act, ts_mono_ns, ts_wall_us, metadata=None):
        self.obs = np.atleast_2d(np.asarray(obs, dtype=np.float64))
        self.act = np.atleast_2d(np.asarray(act, dtype=np.float64))
        self.ts_mono_ns = np.asarray(ts_mono_ns, dtype=np.int64)
        self.ts_wall_us = np.asarray(ts_wall_us, dtype=np.int64)
        self.metadata = dict(metadata or {})
        n = len(self.ts_mono_ns)
        if n == 0:
            self.obs = self.obs.reshape(0, self.obs.shape[-1] if self.obs.size else 0)
            self.act = self.act.reshape(0, self.act.shape[-1] if self.act.size else 0)
        if not (len(self.obs) == len(self.act) == n == len(self.ts_wall_us)):
            raise ValueError("obs, act and timestamps must have equal length")

    def __len__(self):
        return len(self.ts_mono_ns)

    def steps(self):
        for i in range(len(self)):
            yield self.obs[i], self.act[i], (int(self.ts_mono_ns[i]),
                                             int(self.ts_wall_us[i]))

    @property
    def obs_dim(self):
        return self.obs.shape[1]

    @property
    def act_dim(self):
        return self.act.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Demonstration):
            return NotImplemented
        return (
            np.array_equal(self.obs, other.obs)
            and np.array_equal(self.act, other.act)
            and np.array_equal(self.ts_mono_ns, other.ts_mono_ns)
            and np.array_equal(self.ts_wall_us, other.ts_wall_us)
            and self.metadata == other.metadata
        )


def save(demo, path):
    header = {
        "version": SCHEMA_VERSION,
        "steps": len(demo),
        "obs_dim": int(demo.obs.shape[1]),
        "act_dim": int(demo.act.shape[1]),
        "metadata": demo.metadata,
    }
    blob = json.dumps(header).encode("utf-8")
    try:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<I", len(blob)))
            fh.write(blob)
            fh.write(np.ascontiguousarray(demo.obs, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(demo.act, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(demo.ts_mono_ns, dtype="<i8").tobytes())
            fh.write(np.ascontiguousarray(demo.ts_wall_us, dtype="<i8").tobytes())
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e
    return path


def load(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    if data[:4] != MAGIC:
        raise IoFailure(f"{path} is not a demonstration file")
    (hlen,) = struct.unpack_from("<I", data, 4)
    header = json.loads(data[8:8 + hlen].decode("utf-8"))
    if header.get("version") != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"{path} has schema version {header.get('version')}, expected {SCHEMA_VERSION}")
    n = header["steps"]
    od = header["obs_dim"]
    ad = header["act_dim"]
    off = 8 + hlen

    def take(count, dtype):
        nonlocal off
        nbytes = count * 8
        arr = np.frombuffer(data[off:off + nbytes], dtype=dtype).copy()
        off += nbytes
        return arr

    obs = take(n * od, "<f8").reshape(n, od)
    act = take(n * ad, "<f8").reshape(n, ad)
    ts_mono = take(n, "<i8")
    ts_wall = take(n, "<i8")
    return Demonstration(obs, act, ts_mono, ts_wall, header["metadata"])
