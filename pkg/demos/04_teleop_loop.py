"""The live pipeline: synthetic 90 Hz hand source through retargeting to a
simulated arm, with rate and latency measured on the wire.

This is the same wiring `openteach bench` uses. Expect ~900 ticks over
10 s and single-digit-millisecond end-to-end latency.
"""

import json

from openteach.pipeline import bench

summary = bench(preset="90hz", secs=10.0, robot="arm", kinematic=True)
print(json.dumps(summary, indent=2))

print(f"\nachieved {summary['ticks']} ticks at {summary['tick_hz']:.2f} Hz, "
      f"published {summary['states']} robot states")
print(f"hand-frame to robot-state latency: "
      f"p50 {summary['latency_p50_ms']:.2f} ms, "
      f"p99 {summary['latency_p99_ms']:.2f} ms")
