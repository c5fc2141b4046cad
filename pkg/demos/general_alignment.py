"""Aligning a word that is not a run of the net, with actions and times both priced.

Three ``a`` events at time 100. The only run reading ``aaa`` must fire at
time 0, so keeping the actions costs 30 time units. Allowing the second-best
untimed candidate (replace the first ``a`` by ``b``) costs two edits and no
time at all.
"""

from fractions import Fraction

from timed_align import fixtures as F
from timed_align.general import CostConfig, align_general
from timed_align.net import TimedTrace

word = TimedTrace.of(("a", 100), ("a", 100), ("a", 100))
for k in (1, 2):
    res = align_general(F.n3(), word, CostConfig(c_A=1, c_T=Fraction(1, 10), k=k), "d_t")
    print(f"k={k}: {' '.join(str(m) for m in res.edit_script)}")
    aligned = ", ".join(f"({a}, {t})" for a, t in res.aligned_word.events)
    print(f"     aligned {aligned}")
    print(f"     action cost {res.action_cost}, time cost {res.time_cost}, total {res.total}")
    print(f"     replayable under urgency: {res.model_valid}")

strict = align_general(F.n3(), word, CostConfig(1, Fraction(1, 10), k=2), "d_t", strict=True)
print(f"strict mode (only replayable candidates): total {strict.total}")
