import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from timed_align import fixtures as F
from timed_align.causal import is_valid_timing, timing_from_sequence, unroll
from timed_align.generators import random_process_instance
from timed_align.oracle import (
    GridSpec,
    SizeGuardExceeded,
    brute_align,
    enumerate_valid_timings,
    mixed_distance,
    mixed_distance_search,
    size_guard,
    upper_bounds,
)


@pytest.fixture
def ex3():
    net = F.example3()
    cp = unroll(net, ["t1", "t2", "t3"])
    return net, cp, timing_from_sequence(cp, [3, 4, 5])


def test_brute_example3(ex3):
    net, cp, sigma = ex3
    assert GridSpec.for_instance(net, cp, sigma) == GridSpec(1, 13)
    cost, tau = brute_align(net, cp, sigma, "d_t")
    assert cost == 4 and tau == {"e1": 1, "e2": 3, "e3": 4}
    cost, tau = brute_align(net, cp, sigma, "delay")
    assert cost == 3 and tau == {"e1": 1, "e2": 3, "e3": 4}
    with pytest.raises(ValueError, match="metric"):
        brute_align(net, cp, sigma, "euclid")


def test_enumerate_half_grid(ex3):
    net, cp, _ = ex3
    found = list(enumerate_valid_timings(net, cp, GridSpec(Fraction(1, 2), 10)))
    assert [tuple(t.values()) for t in found] == [(0, 2, 3), (Fraction(1, 2), Fraction(5, 2), Fraction(7, 2)), (1, 3, 4)]


def test_enumerated_timings_are_valid():
    net = F.example1()
    cp = unroll(net, list("abdef"))
    found = list(enumerate_valid_timings(net, cp, GridSpec(1, 6)))
    assert len(found) == 59
    assert all(is_valid_timing(net, cp, t) for t in found)


def test_mixed_distance_example3(ex3):
    _, cp, sigma = ex3
    gamma = timing_from_sequence(cp, [1, 3, 4])
    assert mixed_distance(cp, sigma, gamma) == 2
    assert mixed_distance_search(cp, sigma, gamma) == 2
    assert upper_bounds(cp, sigma, gamma) == (4, 3)


def test_mixed_distance_branching():
    cp = unroll(F.example1(), list("abdef"))
    g = timing_from_sequence(cp, [1, 2, 3, 4, 5])
    h = timing_from_sequence(cp, [0, 2, 4, 4, 7])
    assert mixed_distance(cp, g, h) == 4
    assert mixed_distance_search(cp, g, h) == 4


def test_mixed_distance_on_finer_grid(ex3):
    _, cp, sigma = ex3
    gamma = {"e1": Fraction(5, 2), "e2": Fraction(7, 2), "e3": Fraction(9, 2)}
    # one delay move of -1/2 at the root
    assert mixed_distance(cp, sigma, gamma, GridSpec(Fraction(1, 2))) == Fraction(1, 2)
    with pytest.raises(ValueError, match="grid"):
        mixed_distance(cp, sigma, gamma)


def test_size_guard(monkeypatch):
    net, cp, sigma = random_process_instance(random.Random(0), max_events=5)
    assert size_guard() == 8
    monkeypatch.setenv("TIMED_ALIGN_GUARD", "1")
    assert size_guard() == 1
    if len(cp.events) > 1:
        with pytest.raises(SizeGuardExceeded):
            brute_align(net, cp, sigma, "d_t")
    big = unroll(F.chain([(0, 1)] * 9), [f"t{i}" for i in range(1, 10)])
    monkeypatch.delenv("TIMED_ALIGN_GUARD")
    with pytest.raises(SizeGuardExceeded):
        mixed_distance(big, {e: 0 for e in big.events}, {e: 0 for e in big.events})


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(0, 5)
    with pytest.raises(ValueError):
        GridSpec(1, -1)


@settings(max_examples=80, deadline=None)
@given(
    run=st.sampled_from([list("acef"), ["t1", "t2", "t3"]]),
    data=st.data(),
)
def test_mixed_search_agrees_with_branch_and_bound(run, data):
    net = F.example1() if run[0] == "a" else F.example3()
    cp = unroll(net, run)
    n = len(run)
    t1 = dict(zip(cp.events, data.draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))))
    t2 = dict(zip(cp.events, data.draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))))
    d = mixed_distance(cp, t1, t2)
    assert d == mixed_distance_search(cp, t1, t2)
    assert d <= min(upper_bounds(cp, t1, t2))
