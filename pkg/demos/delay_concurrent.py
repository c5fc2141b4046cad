"""Delay alignment on a net with concurrency.

Under the delay distance, an event is charged for how long it waited after
its causes, not for its absolute timestamp. Shifting a whole branch costs
once, at the point where the shift starts.
"""

from timed_align import fixtures as F
from timed_align.causal import delay_distance, is_valid_timing, manhattan, timing_from_sequence, unroll
from timed_align.delay import align_delay

net = F.n2()
cp = unroll(net, list("abcdefg"))
sigma = timing_from_sequence(cp, [1, 2, 5, 6, 6, 8, 8])

print("observed timing valid?", bool(is_valid_timing(net, cp, sigma)))
res = align_delay(net, cp, sigma)
print("events timed in order:", " ".join(res.order))
for ev in cp.events:
    print(f"  {ev:>4} ({cp.hom[ev]}): observed {sigma[ev]!s:>3} -> aligned {res.gamma[ev]!s:>3}  flow {res.flow_gamma[ev]}")
print("delay cost:", res.cost, "| recomputed:", delay_distance(cp, sigma, res.gamma))
print("for comparison, timestamp distance of the same pair:", manhattan(sigma, res.gamma))
print("aligned timing valid?", bool(is_valid_timing(net, cp, res.gamma)))
