"""Property checks: metric axioms, label invariance of the delay algorithm, mixed bound."""

import random
from dataclasses import replace
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from timed_align import fixtures as F
from timed_align.causal import delay_distance, manhattan, timing_from_sequence, unroll
from timed_align.delay import NoValidTiming, align_delay
from timed_align.generators import random_process_instance
from timed_align.oracle import mixed_distance

CP = unroll(F.n2(), list("abcdefg"))
stamps = st.fractions(min_value=0, max_value=20, max_denominator=4)
timings = st.lists(stamps, min_size=7, max_size=7).map(lambda xs: dict(zip(sorted(CP.events), xs)))


@settings(max_examples=150, deadline=None)
@given(timings, timings, timings)
def test_metric_axioms(x, y, z):
    for d in (manhattan, lambda a, b: delay_distance(CP, a, b)):
        assert d(x, x) == 0
        assert d(x, y) == d(y, x) >= 0
        assert d(x, z) <= d(x, y) + d(y, z)
        assert (d(x, y) == 0) == (x == y)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_delay_cost_ignores_labels(seed):
    rng = random.Random(seed)
    net, cp, sigma = random_process_instance(rng, max_events=5, sigma_step=4)
    relabelled = replace(net, transitions=[replace(t, label=f"x{i % 2}") for i, t in enumerate(net.transitions)])
    cp2 = unroll(relabelled, [cp.hom[e] for e in cp.events])
    try:
        expected = align_delay(net, cp, sigma).cost
    except NoValidTiming:
        expected = None
    try:
        got = align_delay(relabelled, cp2, dict(zip(cp2.events, (sigma[e] for e in cp.events)))).cost
    except NoValidTiming:
        got = None
    assert got == expected


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=3, max_size=3), st.lists(st.integers(0, 6), min_size=3, max_size=3))
def test_mixed_below_both_metrics(a, b):
    cp = unroll(F.example3(), ["t1", "t2", "t3"])
    t1, t2 = timing_from_sequence(cp, sorted(a)), timing_from_sequence(cp, sorted(b))
    assert mixed_distance(cp, t1, t2) <= min(manhattan(t1, t2), delay_distance(cp, t1, t2))
    assert mixed_distance(cp, t1, t1) == 0
