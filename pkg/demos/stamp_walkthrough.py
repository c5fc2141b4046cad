"""Stamp alignment on a six-step chain, one value function at a time.

Each transition of the chain has a static interval; the observed word is
off by a little. The dynamic program builds one convex piecewise-linear
function per step, then walks back through them to pick the timestamps.
The same instance is exported as an LP and solved with HiGHS to confirm
the optimum.
"""

from timed_align import fixtures as F
from timed_align.causal import unroll
from timed_align.stamp import align_stamp, dump_graphs, export_lp, solve_lp

intervals, sigma = F.EXAMPLE4_INTERVALS, F.EXAMPLE4_SIGMA
print("intervals:", [(str(a), str(b)) for a, b in intervals])
print("observed: ", [str(s) for s in sigma])

res = align_stamp(intervals, sigma)
print("\nvalue functions (index; base x; base y; segments):")
print(dump_graphs(res.graphs).rstrip())

print("\naligned:  ", [str(g) for g in res.gamma])
print("cost:     ", res.cost)

net = F.example4()
cp = unroll(net, [f"t{i}" for i in range(1, len(intervals) + 1)])
optimum, _ = solve_lp(export_lp(cp, net, sigma))
print("LP optimum (HiGHS):", optimum)
