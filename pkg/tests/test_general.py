import math
import random
from fractions import Fraction

import pytest

from timed_align import fixtures as F
from timed_align.general import (
    CostConfig,
    Move,
    NoAdmissibleCandidate,
    align_general,
    edit_script_for,
    transfer_timestamps,
    untimed_align_kbest,
)
from timed_align.delay import NotEFC
from timed_align.generators import random_workflow_net, random_untimed_run
from timed_align.net import NetError, TimedTrace, TimePetriNet, Transition

W8 = TimedTrace.of(("a", 100), ("a", 100), ("a", 100))


def test_example8_two_candidates():
    config = CostConfig(1, Fraction(1, 10), k=2)
    res = align_general(F.n3(), W8, config, "d_t")
    assert res.total == 2
    assert res.aligned_word.actions == ("b", "a", "a")
    assert res.aligned_word.timestamps == (100, 100, 100)
    assert (res.action_cost, res.time_cost) == (2, 0)


def test_example8_single_candidate():
    res = align_general(F.n3(), W8, CostConfig(1, Fraction(1, 10), k=1), "d_t")
    assert res.total == 30
    assert res.aligned_word.events == (("a", 0), ("a", 0), ("a", 0))
    assert res.model_valid


def test_example8_strict_mode_respects_urgency():
    # the upper a must fire at 0, so (b, 100) is not a timed behaviour of n3
    res = align_general(F.n3(), W8, CostConfig(1, Fraction(1, 10), k=2), "d_t", strict=True)
    assert res.total == 30
    assert len(res.skipped) == 1
    loose = align_general(F.n3(), W8, CostConfig(1, Fraction(1, 10), k=2), "d_t")
    assert not loose.model_valid


def test_kbest_n3():
    cands = untimed_align_kbest(F.n3(), "aaa", 3)
    assert [(c.run, c.action_cost) for c in cands] == [(("a1", "a2", "a3"), 0), (("b", "a4", "a5"), 2)]
    assert [str(m) for m in cands[1].script] == ["delete(0:a)", "insert(b)", "match(1:a)", "match(2:a)"]


def test_kbest_threshold():
    cands = untimed_align_kbest(F.example1(), "abxef", 1, threshold=True)
    assert [(c.run, c.action_cost) for c in cands][:2] == [(("a", "b", "e", "f"), 1), (("a", "b", "d", "e", "f"), 2)]
    assert all(c.action_cost <= 2 for c in cands)


def test_kbest_ordering_and_ties():
    cands = untimed_align_kbest(F.example1(), "abxef", 3)
    assert [c.run for c in cands] == [("a", "b", "e", "f"), ("a", "b", "d", "e", "f"), ("a", "d", "b", "e", "f")]


def test_empty_word_single_transition():
    cands = untimed_align_kbest(F.chain([(0, 1)]), [], 1, c_A=3)
    assert len(cands) == 1 and cands[0].action_cost == 3
    assert cands[0].script == (Move("insert", "t1", None, "t1"),)


def test_empty_language():
    net = TimePetriNet(["p", "q"], [Transition("t", "t", 0, 1)], [("p", "t")], {"p": 1}, {"q": 1})
    with pytest.raises(NetError, match="unreachable"):
        untimed_align_kbest(net, "t", 1)


def test_transfer_timestamps():
    w = TimedTrace.of(("a", 1), ("b", 2))
    ident = [Move("match", "a", 0, "a"), Move("match", "b", 1, "b")]
    assert transfer_timestamps(w, ident) == (["a", "b"], [1, 2])
    assert transfer_timestamps(w, [Move("delete", "a", 0), Move("match", "b", 1, "b")]) == (["b"], [2])
    five = TimedTrace.of(("a", 5))
    assert transfer_timestamps(five, [Move("match", "a", 0, "a"), Move("insert", "b", None, "b")]) == (
        ["a", "b"], [5, 5])
    assert transfer_timestamps(five, [Move("insert", "b", None, "b"), Move("match", "a", 0, "a")])[1] == [0, 5]


@pytest.mark.parametrize(
    "script",
    [
        [Move("match", "b", 0, "b")],
        [Move("match", "a", 0, "a")],
        [Move("match", "b", 1, "b"), Move("match", "a", 0, "a")],
        [Move("swap", "a", 0)],
    ],
)
def test_transfer_rejects_mismatched_scripts(script):
    with pytest.raises(ValueError):
        transfer_timestamps(TimedTrace.of(("a", 1), ("b", 2)), script)


def test_edit_script_prefers_early_deletions():
    script = edit_script_for("ab", ["x", "b"], ["x", "b"])
    assert [m.kind for m in script] == ["delete", "insert", "match"]


def test_word_in_language_is_kept():
    w = TimedTrace.of(("a", 1), ("b", 2), ("d", 3), ("e", 4), ("f", 5))
    res = align_general(F.example1(), w, CostConfig(), "d_theta")
    assert res.total == 0 and res.aligned_word.events == w.events


def test_general_delay_on_concurrent_net():
    w = TimedTrace.of(*zip("abcdefg", [1, 2, 5, 6, 6, 8, 8]))
    res = align_general(F.n2(), w, CostConfig(k=3), "d_theta")
    assert res.total == 8
    assert res.aligned_word.timestamps == (1, 1, 4, 7, 7, 8, 10)
    with pytest.raises(NoAdmissibleCandidate, match="not linear"):
        align_general(F.n2(), w, CostConfig(k=3), "d_t")


def test_general_rejects_non_efc_for_delay():
    T = Transition
    net = TimePetriNet(["p", "q", "r"], [T("t", "t", 0), T("u", "u", 0)],
                       [("p", "t"), ("q", "t"), ("q", "u"), ("t", "r")], {"p": 1, "q": 1}, {"r": 1})
    with pytest.raises(NotEFC):
        align_general(net, TimedTrace.of(("t", 0)), CostConfig(), "d_theta")


def test_cost_config_validation():
    with pytest.raises(ValueError):
        CostConfig(0, 1)
    with pytest.raises(ValueError):
        CostConfig(1, 1, k=0)
    assert CostConfig("0.5", "1/10").c_T == Fraction(1, 10)


def _random_word(rng, net):
    run = random_untimed_run(net, rng, 6) or random_untimed_run(net, rng, 40, attempts=2000)
    labels = [net.label(t) for t in run]
    if labels and rng.random() < 0.5:
        labels[rng.randrange(len(labels))] = "zz"
    stamps = sorted(rng.randint(0, 12) for _ in labels)
    return TimedTrace(tuple(zip(labels, stamps)))


def test_total_is_monotone_in_k():
    rng = random.Random(8)
    for _ in range(25):
        net = random_workflow_net(rng, 2)
        w = _random_word(rng, net)
        totals = []
        for k in (1, 2, 4):
            try:
                totals.append(align_general(net, w, CostConfig(1, 1, k), "d_theta").total)
            except NoAdmissibleCandidate:
                totals.append(math.inf)
        assert totals[0] >= totals[1] >= totals[2]


def test_tiny_time_weight_follows_untimed_best():
    rng = random.Random(9)
    for _ in range(15):
        net = random_workflow_net(rng, 2)
        w = _random_word(rng, net)
        try:
            res = align_general(net, w, CostConfig(1, Fraction(1, 10**9), k=3), "d_theta")
        except NoAdmissibleCandidate:
            continue
        best = untimed_align_kbest(net, w.actions, 1)[0]
        assert res.action_cost == best.action_cost


def test_huge_action_cost_keeps_actions():
    w = TimedTrace.of(("a", 0), ("c", 7), ("d", 7), ("e", 20), ("f", 30))
    res = align_general(F.example1(), w, CostConfig(10**6, 1, k=3), "d_theta")
    assert res.aligned_word.actions == w.actions
    assert res.action_cost == 0
