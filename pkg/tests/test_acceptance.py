"""Acceptance criteria, one check each, with a PASS/FAIL line per criterion.

Run as part of ``pytest`` (the lines appear in the terminal summary) or on
its own with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from _support import recursion_mismatches  # noqa: E402

from timed_align import fixtures as F  # noqa: E402
from timed_align.causal import (  # noqa: E402
    delay_distance,
    flow,
    is_valid_timing,
    manhattan,
    timing_from_sequence,
    unflow,
    unroll,
)
from timed_align.delay import NoValidTiming, align_delay  # noqa: E402
from timed_align.general import CostConfig, align_general  # noqa: E402
from timed_align.generators import (  # noqa: E402
    loop_workflow_instance,
    random_chain_instance,
    random_process_instance,
)
from timed_align.net import TimedTrace, replay_timed, simulate_random  # noqa: E402
from timed_align.oracle import NoFeasibleTiming, brute_align, mixed_distance  # noqa: E402
from timed_align.stamp import align_stamp  # noqa: E402

RESULTS: dict[int, tuple[bool, str]] = {}

# instances shared between criteria 3, 4 and 7
_ORACLE_INSTANCES: dict[str, list] = {"stamp": [], "delay": []}


def _chain_process(intervals):
    net = F.chain(intervals)
    return net, unroll(net, [f"t{i}" for i in range(1, len(intervals) + 1)])


def _record(n: int, ok: bool, detail: str) -> tuple[bool, str]:
    RESULTS[n] = (ok, detail)
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
    return ok, detail


def criterion_1():
    t0 = time.perf_counter()
    res = align_stamp(F.EXAMPLE4_INTERVALS, F.EXAMPLE4_SIGMA)
    elapsed = time.perf_counter() - t0
    net, cp = _chain_process(F.EXAMPLE4_INTERVALS)
    gamma = timing_from_sequence(cp, res.gamma)
    sigma = timing_from_sequence(cp, F.EXAMPLE4_SIGMA)
    reference = timing_from_sequence(cp, [0, 2, 5, 6, 6, 8])
    ok = (
        res.cost == 2
        and bool(is_valid_timing(net, cp, gamma))
        and manhattan(gamma, sigma) == 2
        and bool(is_valid_timing(net, cp, reference))
        and manhattan(reference, sigma) == 2
        and elapsed < 1
    )
    return _record(1, ok, f"Example 4 cost {res.cost}, gamma {[str(x) for x in res.gamma]}, {elapsed:.4f}s")


def criterion_2():
    net = F.example3()
    cp = unroll(net, ["t1", "t2", "t3"])
    sigma = timing_from_sequence(cp, [3, 4, 5])
    st = align_stamp([(0, 1), (2, 2), (1, 1)], [3, 4, 5])
    de = align_delay(net, cp, sigma)
    target = timing_from_sequence(cp, [1, 3, 4])
    mixed = mixed_distance(cp, sigma, target)
    ok = (
        st.cost == 4 and st.gamma == (1, 3, 4)
        and de.cost == 3 and de.gamma == target
        and mixed == 2
    )
    return _record(2, ok, f"Example 3 d_t={st.cost}, d_theta={de.cost}, mixed={mixed}")


def criterion_3():
    rng = random.Random(20260301)
    t0 = time.perf_counter()
    mismatches = 0
    _ORACLE_INSTANCES["stamp"].clear()
    for _ in range(200):
        n = rng.randint(1, 5)
        intervals, sigma = random_chain_instance(rng, n, max_bound=4, max_sigma=12)
        net, cp = _chain_process(intervals)
        res = align_stamp(intervals, sigma)
        brute, _ = brute_align(net, cp, timing_from_sequence(cp, sigma), "d_t")
        if res.cost != brute:
            mismatches += 1
        _ORACLE_INSTANCES["stamp"].append((intervals, sigma, cp, res))
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 60
    return _record(3, ok, f"200 stamp instances, {mismatches} mismatches, {elapsed:.1f}s")


def criterion_4():
    rng = random.Random(20260302)
    compared = mismatches = invalid = infeasible = disagreements = 0
    _ORACLE_INSTANCES["delay"].clear()
    while compared < 200:
        net, cp, sigma = random_process_instance(rng, max_events=5, max_bound=4, sigma_step=4)
        try:
            res = align_delay(net, cp, sigma)
        except NoValidTiming:
            infeasible += 1
            try:
                brute_align(net, cp, sigma, "d_theta")
                disagreements += 1
            except NoFeasibleTiming:
                pass
            continue
        compared += 1
        brute, _ = brute_align(net, cp, sigma, "d_theta")
        mismatches += res.cost != brute
        invalid += not is_valid_timing(net, cp, res.gamma)
        _ORACLE_INSTANCES["delay"].append((net, cp, sigma, res))
    ok = mismatches == 0 and invalid == 0 and disagreements == 0
    return _record(
        4, ok,
        f"200 EFC instances, {mismatches} cost mismatches, {invalid} invalid outputs "
        f"({infeasible} infeasible instances skipped, {disagreements} disagreements)",
    )


def criterion_5():
    rng = random.Random(20260303)
    nets = [F.example1(), F.n1(), F.n2(), F.example3(), F.example4()]
    agree = negatives = 0
    for i in range(500):
        net = nets[i % len(nets)]
        run = simulate_random(net, i, 40, min_events=3 if net.name == "n1" else 0)
        transitions = [t for t, _ in run]
        stamps = [ts for _, ts in run]
        if i % 2 and stamps:
            # move one stamp inside its neighbours so the order is kept
            j = rng.randrange(len(stamps))
            lo = stamps[j - 1] if j else Fraction(0)
            hi = stamps[j + 1] if j + 1 < len(stamps) else stamps[j] + 3
            stamps[j] = lo + (hi - lo) * Fraction(rng.randint(0, 4), 4)
        cp = unroll(net, transitions)
        replay = bool(replay_timed(net, list(zip(transitions, stamps))))
        valid = bool(is_valid_timing(net, cp, timing_from_sequence(cp, stamps), method="general"))
        agree += replay == valid
        negatives += not replay
    ok = agree == 500
    return _record(5, ok, f"{agree}/500 runs agree ({negatives} invalid after perturbation)")


def _slope(xs, ts):
    return math.log(ts[1] / ts[0]) / math.log(xs[1] / xs[0])


def _best_time(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def criterion_6():
    rng = random.Random(20260304)
    stamp_times = []
    for n in (100, 1000):
        intervals, sigma = random_chain_instance(rng, n, max_sigma=None)
        stamp_times.append(_best_time(lambda: align_stamp(intervals, sigma), 3))
    stamp_slope = _slope((100, 1000), stamp_times)
    sizes, delay_times = [], []
    for rounds in (40, 400):
        net, cp, sigma = loop_workflow_instance(rng, rounds)
        sizes.append(len(cp.events))
        delay_times.append(_best_time(lambda: align_delay(net, cp, sigma), 5))
    delay_slope = _slope(sizes, delay_times)
    ok = stamp_times[1] < 60 and stamp_slope <= 2.5 and delay_slope <= 1.3
    return _record(
        6, ok,
        f"stamp n=1000 in {stamp_times[1]:.3f}s, slope {stamp_slope:.2f} (<= 2.5); "
        f"delay |E| {sizes[0]}->{sizes[1]} slope {delay_slope:.2f} (<= 1.3)",
    )


def _metric_axioms(rng, samples):
    pools = [
        (unroll(F.example1(), list("abdef")), 10),
        (unroll(F.n2(), list("abcdefg")), 20),
        (unroll(F.example4(), [f"t{i}" for i in range(1, 7)]), 12),
    ]
    failures = 0
    for k in range(samples):
        cp, top = pools[k % len(pools)]

        def draw():
            return {e: Fraction(rng.randint(0, 4 * top), 4) for e in cp.events}

        x, y, z = draw(), draw(), draw()
        for d in (manhattan, lambda a, b: delay_distance(cp, a, b)):
            dxy, dyz, dxz = d(x, y), d(y, z), d(x, z)
            failures += not (
                d(x, x) == 0 and dxy >= 0 and dxy == d(y, x) and dxz <= dxy + dyz and (dxy == 0) == (x == y)
            )
    return failures


def _roundtrips(rng, samples):
    cp = unroll(F.n2(), list("abcdefg"))
    failures = 0
    for _ in range(samples):
        stamps = sorted(Fraction(rng.randint(0, 60), rng.randint(1, 6)) for _ in cp.events)
        tau = timing_from_sequence(cp, stamps)
        failures += unflow(cp, flow(cp, tau)) != tau
    return failures


def criterion_7():
    rng = random.Random(20260305)
    axiom_failures = _metric_axioms(rng, 1000)
    roundtrip_failures = _roundtrips(rng, 1000)
    if not _ORACLE_INSTANCES["stamp"]:
        criterion_3()
    if not _ORACLE_INSTANCES["delay"]:
        criterion_4()
    graph_sets = [
        (align_stamp(F.EXAMPLE4_INTERVALS, F.EXAMPLE4_SIGMA).graphs, F.EXAMPLE4_INTERVALS, F.EXAMPLE4_SIGMA),
        (align_stamp([(0, 1), (2, 2), (1, 1)], [3, 4, 5]).graphs, [(0, 1), (2, 2), (1, 1)], [3, 4, 5]),
    ] + [(res.graphs, iv, sig) for iv, sig, _, res in _ORACLE_INSTANCES["stamp"]]
    graph_failures = 0
    for graphs, intervals, sigma in graph_sets:
        try:
            for g in graphs:
                g.check()
        except ValueError:
            graph_failures += 1
            continue
        graph_failures += bool(recursion_mismatches(graphs, intervals, sigma))
    mixed_failures = 0
    pairs = [
        (cp, timing_from_sequence(cp, sig), timing_from_sequence(cp, res.gamma))
        for _, sig, cp, res in _ORACLE_INSTANCES["stamp"]
    ] + [(cp, sigma, res.gamma) for _, cp, sigma, res in _ORACLE_INSTANCES["delay"]]
    for cp, a, b in pairs:
        mixed_failures += mixed_distance(cp, a, b) > min(manhattan(a, b), delay_distance(cp, a, b))
    ok = axiom_failures == roundtrip_failures == graph_failures == mixed_failures == 0
    return _record(
        7, ok,
        f"metric axioms {axiom_failures} failures/1000 triples, flow round-trip {roundtrip_failures}/1000, "
        f"graph convexity+recursion {graph_failures}/{len(graph_sets)}, mixed bound {mixed_failures}/{len(pairs)}",
    )


def criterion_8():
    w = TimedTrace.of(("a", 100), ("a", 100), ("a", 100))
    two = align_general(F.n3(), w, CostConfig(1, Fraction(1, 10), k=2), "d_t")
    three = align_general(F.n3(), w, CostConfig(1, Fraction(1, 10), k=3), "d_t")
    one = align_general(F.n3(), w, CostConfig(1, Fraction(1, 10), k=1), "d_t")
    ok = (
        two.total == 2 and two.aligned_word.actions == ("b", "a", "a")
        and three.total == 2 and three.aligned_word.actions == ("b", "a", "a")
        and one.total == 30
    )
    return _record(8, ok, f"Example 8 k=2 total {two.total} via {' '.join(two.aligned_word.actions)}; k=1 total {one.total}")


def test_criterion_1():
    assert criterion_1()[0]


def test_criterion_2():
    assert criterion_2()[0]


def test_criterion_3():
    assert criterion_3()[0]


def test_criterion_4():
    assert criterion_4()[0]


def test_criterion_5():
    assert criterion_5()[0]


def test_criterion_6():
    assert criterion_6()[0]


def test_criterion_7():
    assert criterion_7()[0]


def test_criterion_8():
    assert criterion_8()[0]


if __name__ == "__main__":
    outcomes = [f() for f in (criterion_1, criterion_2, criterion_3, criterion_4,
                              criterion_5, criterion_6, criterion_7, criterion_8)]
    sys.exit(0 if all(ok for ok, _ in outcomes) else 1)
