"""Topic bus tour: framing, policies, and loss semantics.

Publishes hand frames onto an in-process bus under the two delivery
policies and shows what a fast producer looks like to a slow consumer:
bounded queues drop oldest, conflation keeps the latest.
"""

import numpy as np

from openteach.hands import make_frame
from openteach.wire import Bus, HandFrame, Timestamp, TopicPolicy, decode, encode
from openteach.wire.messages import Envelope

bus = Bus().register("hand/frames", HandFrame, TopicPolicy.conflate())

# -- binary framing round trip ---------------------------------------------
frame = make_frame(ts=Timestamp(1, 1), wrist=(0.1, 0.0, 0.0))
env = Envelope("hand/frames", 0, Timestamp(2, 2), frame)
blob = encode(env)
print(f"encoded envelope: {len(blob)} bytes, round-trip equal:",
      decode(blob) == env)

# -- bounded queue vs conflation ---------------------------------------------
queued = bus.subscribe("hand/frames", TopicPolicy.queue(4))
latest = bus.subscribe("hand/frames", TopicPolicy.conflate())

for i in range(20):
    bus.publish("hand/frames", make_frame(ts=Timestamp(i + 1, 1),
                                          wrist=(0.01 * i, 0, 0)))

got = queued.drain()
print("bounded queue kept the last 4 of 20:",
      [e.seq for e in got], f"(dropped {queued.dropped})")
print("conflating reader sees only the newest:", latest.poll().seq)

# seq gaps tell a reader exactly how much it missed
print("gap before first delivered message:", got[0].seq - 0, "drops")
