"""Random instances: chains with observed words, block-structured workflow nets.

Workflow nets are grown from sequence, exclusive choice, parallel split/join
and loop blocks. Every place is consumed either by a single transition or by
a set of transitions with that place as their whole preset, so the nets are
extended free choice and 1-safe, and nothing is enabled in the final marking.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import accumulate

from .causal import CausalProcess, TimingFunction, timing_from_sequence, unroll
from .fixtures import chain
from .net import TimePetriNet, Transition, untimed_successors
from .rational import INF, Bound


def random_interval(rng: random.Random, max_bound: int = 4, inf_prob: float = 0.0) -> tuple[Fraction, Bound]:
    eft = rng.randint(0, max_bound)
    if rng.random() < inf_prob:
        return Fraction(eft), INF
    return Fraction(eft), Fraction(rng.randint(eft, max_bound))


def random_chain_instance(
    rng: random.Random, n: int, *, max_bound: int = 4, max_sigma: int | None = 12
) -> tuple[list[tuple[Fraction, Bound]], list[Fraction]]:
    """``n`` integer intervals and a nondecreasing integer word.

    With ``max_sigma=None`` stamps grow with ``n`` (increments up to ``max_bound``).
    """
    intervals = [random_interval(rng, max_bound) for _ in range(n)]
    if max_sigma is None:
        sigma = list(accumulate(Fraction(rng.randint(0, max_bound)) for _ in range(n)))
    else:
        sigma = sorted(Fraction(rng.randint(0, max_sigma)) for _ in range(n))
    return intervals, sigma


class _Builder:
    def __init__(self, rng: random.Random, max_bound: int, inf_prob: float):
        self.rng = rng
        self.max_bound = max_bound
        self.inf_prob = inf_prob
        self.places: list[str] = []
        self.transitions: list[Transition] = []
        self.arcs: list[tuple[str, str]] = []

    def place(self) -> str:
        p = f"p{len(self.places)}"
        self.places.append(p)
        return p

    def transition(self, pre: list[str], post: list[str], label: str | None = None) -> str:
        t = f"t{len(self.transitions)}"
        eft, lft = random_interval(self.rng, self.max_bound, self.inf_prob)
        self.transitions.append(Transition(t, label or t, eft, lft))
        self.arcs += [(p, t) for p in pre] + [(t, p) for p in post]
        return t

    def block(self, entry: str, exit_: str, depth: int) -> None:
        kind = "atom" if depth <= 0 else self.rng.choice(["atom", "seq", "seq", "xor", "and", "loop"])
        if kind == "atom":
            self.transition([entry], [exit_])
        elif kind == "seq":
            mid = self.place()
            self.block(entry, mid, depth - 1)
            self.block(mid, exit_, depth - 1)
        elif kind == "xor":
            self.block(entry, exit_, depth - 1)
            self.block(entry, exit_, depth - 1)
        elif kind == "and":
            a, b, c, d = self.place(), self.place(), self.place(), self.place()
            self.transition([entry], [a, b])
            self.block(a, c, depth - 1)
            self.block(b, d, depth - 1)
            self.transition([c, d], [exit_])
        else:
            mid = self.place()
            self.block(entry, mid, depth - 1)
            self.transition([mid], [entry])
            self.transition([mid], [exit_])


def random_workflow_net(
    rng: random.Random, depth: int = 3, *, max_bound: int = 4, inf_prob: float = 0.1, name: str = "workflow"
) -> TimePetriNet:
    b = _Builder(rng, max_bound, inf_prob)
    start, end = b.place(), b.place()
    b.block(start, end, depth)
    return TimePetriNet(b.places, b.transitions, b.arcs, {start: 1}, {end: 1}, name)


def random_untimed_run(
    net: TimePetriNet, rng: random.Random, max_events: int, *, attempts: int = 200
) -> list[str] | None:
    """A uniformly-stepped untimed run from M₀ to M_f with at most ``max_events`` events."""
    for _ in range(attempts):
        marking = dict(net.initial_marking)
        run: list[str] = []
        while not net.is_final(marking) and len(run) < max_events:
            succ = untimed_successors(net, marking)
            if not succ:
                break
            t, marking = rng.choice(succ)
            run.append(t)
        if net.is_final(marking):
            return run
    return None


def random_process_instance(
    rng: random.Random,
    *,
    max_events: int = 5,
    depth: int = 3,
    max_bound: int = 4,
    max_sigma: int = 12,
    sigma_step: int | None = None,
) -> tuple[TimePetriNet, CausalProcess, TimingFunction]:
    """A random workflow net, one of its processes, and an observed (random) timing.

    Stamps are sorted integers up to ``max_sigma``, or, with ``sigma_step``,
    running sums of integer gaps up to ``sigma_step``.
    """
    while True:
        net = random_workflow_net(rng, depth, max_bound=max_bound)
        run = random_untimed_run(net, rng, max_events)
        if run:
            break
    cp = unroll(net, run)
    if sigma_step is None:
        sigma = sorted(Fraction(rng.randint(0, max_sigma)) for _ in run)
    else:
        sigma = list(accumulate(Fraction(rng.randint(0, sigma_step)) for _ in run))
    return net, cp, timing_from_sequence(cp, sigma)


def loop_workflow_net() -> TimePetriNet:
    """Fixed net for delay benchmarks: ``a`` then a loop around a parallel block."""
    T = Transition
    return TimePetriNet(
        ["i", "p", "q1", "q2", "r1", "r2", "j", "o"],
        [
            T("a", "a", 0, 2), T("split", "split", 0, 1), T("b", "b", 1, 3), T("c", "c", 0, 4),
            T("join", "join", 0, 1), T("redo", "redo", 0, 2), T("leave", "leave", 0, 2),
        ],
        [
            ("i", "a"), ("a", "p"), ("p", "split"), ("split", "q1"), ("split", "q2"),
            ("q1", "b"), ("b", "r1"), ("q2", "c"), ("c", "r2"), ("r1", "join"), ("r2", "join"),
            ("join", "j"), ("j", "redo"), ("redo", "p"), ("j", "leave"), ("leave", "o"),
        ],
        {"i": 1},
        {"o": 1},
        "loop_workflow",
    )


def loop_workflow_instance(
    rng: random.Random, rounds: int
) -> tuple[TimePetriNet, CausalProcess, TimingFunction]:
    """``rounds`` passes through the loop (5 events each, plus 1), with a random word."""
    net = loop_workflow_net()
    run = ["a"]
    for r in range(rounds):
        run += ["split", "b", "c", "join", "redo" if r < rounds - 1 else "leave"]
    cp = unroll(net, run)
    sigma = list(accumulate(Fraction(rng.randint(0, 3)) for _ in run))
    return net, cp, timing_from_sequence(cp, sigma)


def random_chain_net(rng: random.Random, n: int, max_bound: int = 4) -> TimePetriNet:
    return chain([random_interval(rng, max_bound) for _ in range(n)])
