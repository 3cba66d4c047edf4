# Candidate-set walkthrough: how the two expander families turn one nominal
# action into a whole set of admissible actions, and what the geometry
# queries on those sets do.

import numpy as np

from weakloop import BoxExpander, SegmentExpander, contains, select

v = np.array([2.0, -10.0])

# Per-axis proportional box: each axis may move by ratio * |v_i|.
box = BoxExpander(gammas=[0.5, 0.1]).expand(v)
print("box around", v)
print("  half lengths:", box.half_lengths)
print("  corner select (+1, -1):", select(box, [1.0, -1.0]))
print("  center admissible:", contains(box, v))

# Rank-one segment: offsets delta * direction * (sensor . v).  The sensor
# measures the nominal action; the direction says which way to stretch.
d = np.array([1.0, -1.0]) / np.sqrt(2.0)
seg_exp = SegmentExpander(direction=d, sensor=d, gamma=0.7)
seg = seg_exp.expand(v)
lo, hi = seg.endpoints()
print("\nsegment around", v)
print("  endpoints:", lo, hi)
print("  physical half length:", seg.half_width)

# This particular direction/sensor pair preserves the coordinate sum: the
# two components trade against each other.
for delta in (-0.7, 0.0, 0.7):
    u = select(seg, delta)
    print(f"  delta={delta:+.1f}: u={u}, sum={u.sum():+.3f}")

# Membership is the contract every decision maker must satisfy.
outside = hi + 0.05 * (hi - v) / np.linalg.norm(hi - v)
print("\n  just past an endpoint admissible?", contains(seg, outside, 1e-9))
