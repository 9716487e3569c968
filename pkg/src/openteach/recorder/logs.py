"""Per-topic demonstration logs.

Each tapped topic gets a newline-delimited JSON file: a header line, then
one record per delivered message carrying the bus seq, the publish
timestamp (the alignment key), the recorder's ingest timestamp, and the
full payload. Taps sit behind bounded queues so a recorder that falls
behind loses its own messages without ever stalling a publisher; what the
queue evicted is counted and reported.
"""

import json
import os
import threading
from dataclasses import dataclass, field

from ..errors import IoFailure
from ..wire.jsoncodec import payload_from_json, payload_to_json
from ..wire.messages import Timestamp, TopicPolicy

SCHEMA_VERSION = 1


@dataclass
class StreamLog:
    topic: str
    path: str
    samples: list = field(default_factory=list)  # (Timestamp, payload, seq)

    def timestamps_s(self):
        return [ts.mono_ns * 1e-9 for ts, _, _ in self.samples]


def _log_filename(topic):
    return topic.replace("/", "_") + ".ndjson"


class Recorder:
    """Taps topics on the bus and appends every delivered message to disk."""

    def __init__(self, bus, topics, out_dir, queue_bound=4096):
        self.bus = bus
        self.topics = list(topics)
        self.out_dir = out_dir
        self.queue_bound = queue_bound
        self._subs = {}
        self._files = {}
        self._counts = {t: 0 for t in self.topics}
        self._seqs = {t: [] for t in self.topics}
        self._stop = threading.Event()
        self._thread = None

    def start(self):
        try:
            os.makedirs(self.out_dir, exist_ok=True)
            for topic in self.topics:
                kind = self.bus.kind_of(topic)
                path = os.path.join(self.out_dir, _log_filename(topic))
                fh = open(path, "w", encoding="utf-8")
                header = {"schema": SCHEMA_VERSION, "topic": topic,
                          "kind": kind.__name__}
                fh.write(json.dumps(header) + "\n")
                self._files[topic] = fh
                self._subs[topic] = self.bus.subscribe(
                    topic, TopicPolicy.queue(self.queue_bound))
        except OSError as e:
            raise IoFailure(f"cannot open log files in {self.out_dir}: {e}") from e
        self._stop.clear()
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()
        return self

    def _run(self):
        while not self._stop.is_set():
            wrote = self._drain_once()
            if not wrote:
                self._stop.wait(0.002)
        self._drain_once()

    def _drain_once(self):
        wrote = False
        for topic, sub in self._subs.items():
            for env in sub.drain():
                ingest = Timestamp.now()
                record = {
                    "seq": env.seq,
                    "pub_mono_ns": env.ts.mono_ns,
                    "pub_wall_us": env.ts.wall_us,
                    "ingest_mono_ns": ingest.mono_ns,
                    "payload": payload_to_json(env.payload),
                }
                self._files[topic].write(json.dumps(record) + "\n")
                self._counts[topic] += 1
                self._seqs[topic].append(env.seq)
                wrote = True
        return wrote

    def stop(self):
        """Flush and close; returns a per-topic report of counts and drops."""
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5.0)
            self._thread = None
        report = {}
        for topic, sub in self._subs.items():
            seqs = self._seqs[topic]
            gap_drops = 0
            if seqs:
                gap_drops = (seqs[-1] - seqs[0] + 1) - len(seqs)
            report[topic] = {
                "received": self._counts[topic],
                "dropped": sub.dropped,
                "seq_gaps": gap_drops,
            }
            self.bus.unsubscribe(sub)
        for fh in self._files.values():
            try:
                fh.flush()
                fh.close()
            except OSError as e:
                raise IoFailure(f"closing log file failed: {e}") from e
        self._subs.clear()
        return report


def record(bus, topics, out_dir, duration_s, queue_bound=4096):
    """Record the given topics for a fixed duration; returns (logs, report)."""
    rec = Recorder(bus, topics, out_dir, queue_bound).start()
    rec._stop.wait(duration_s)
    report = rec.stop()
    logs = {t: load_stream_log(os.path.join(out_dir, _log_filename(t)))
            for t in topics}
    return logs, report


def load_stream_log(path):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    if not lines:
        raise IoFailure(f"{path} is empty (missing header)")
    header = json.loads(lines[0])
    log = StreamLog(topic=header["topic"], path=path)
    for line in lines[1:]:
        if not line.strip():
            continue
        rec = json.loads(line)
        ts = Timestamp(int(rec["pub_mono_ns"]), int(rec["pub_wall_us"]))
        log.samples.append((ts, payload_from_json(rec["payload"]), int(rec["seq"])))
    return log
