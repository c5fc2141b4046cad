"""Small nets used throughout the docs, demos and tests.

``example1``   a forks into an upper choice (b | c) and a lower loop (d*) then e;
               f joins both branches.
``chain``      a sequence of transitions with the given static intervals.
``n1``         a cyclic net whose branching happens only at places, so every
               run has a linear causal process.
``n2``         two concurrent starts (a, b), b forks, g joins c and d.
``n3``         choice between three zero-delay a's and b followed by two a's.
"""

from __future__ import annotations

from collections.abc import Sequence

from .net import TimePetriNet, Transition
from .rational import INF


def _net(name, places, transitions, arcs, m0, mf) -> TimePetriNet:
    return TimePetriNet(
        tuple(places),
        tuple(Transition(*t) for t in transitions),
        tuple(arcs),
        m0,
        mf,
        name,
    )


def example1() -> TimePetriNet:
    return _net(
        "example1",
        ["p0", "p1", "p2", "p3", "p4", "p5"],
        [
            ("a", "a", 0, INF),
            ("b", "b", 1, 1),
            ("c", "c", 0, 2),
            ("d", "d", 1, 3),
            ("e", "e", 1, 4),
            ("f", "f", 0, 3),
        ],
        [
            ("p0", "a"), ("a", "p1"), ("a", "p2"),
            ("p1", "b"), ("b", "p3"),
            ("p1", "c"), ("c", "p3"),
            ("p2", "d"), ("d", "p2"),
            ("p2", "e"), ("e", "p4"),
            ("p3", "f"), ("p4", "f"), ("f", "p5"),
        ],
        {"p0": 1},
        {"p5": 1},
    )


def chain(intervals: Sequence[tuple[object, object]], labels: Sequence[str] | None = None) -> TimePetriNet:
    """``p0 -> t1 -> p1 -> ... -> tn -> pn`` with ``ti`` carrying ``intervals[i-1]``."""
    n = len(intervals)
    labels = list(labels) if labels is not None else [f"t{i}" for i in range(1, n + 1)]
    places = [f"p{i}" for i in range(n + 1)]
    transitions = [(f"t{i}", labels[i - 1], a, b) for i, (a, b) in enumerate(intervals, start=1)]
    arcs = []
    for i in range(1, n + 1):
        arcs += [(f"p{i - 1}", f"t{i}"), (f"t{i}", f"p{i}")]
    return _net("chain", places, transitions, arcs, {"p0": 1}, {f"p{n}": 1})


def example3() -> TimePetriNet:
    return chain([(0, 1), (2, 2), (1, 1)])


EXAMPLE4_INTERVALS = [(0, 1), (2, 2), (2, 4), (0, 1), (0, 0), (2, 4)]
EXAMPLE4_SIGMA = [1, 2, 4, 6, 6, 8]


def example4() -> TimePetriNet:
    return chain(EXAMPLE4_INTERVALS)


def n1() -> TimePetriNet:
    return _net(
        "n1",
        ["p0", "q", "r"],
        [
            ("a", "a", 0, 1),
            ("b", "b", 2, 2),
            ("c", "c", 2, 3),
            ("d", "d", 0, 0),
            ("e", "e", 2, 2),
        ],
        [
            ("p0", "a"), ("a", "p0"),
            ("p0", "b"), ("b", "q"),
            ("q", "c"), ("c", "r"),
            ("q", "d"), ("d", "r"),
            ("r", "e"), ("e", "p0"),
        ],
        {"p0": 1},
        {"p0": 1},
    )


def n2() -> TimePetriNet:
    return _net(
        "n2",
        ["i1", "i2", "pa", "pb", "pe", "qc", "qd", "pf", "og", "of"],
        [
            ("a", "a", 0, 2),
            ("b", "b", 0, 1),
            ("c", "c", 3, 3),
            ("d", "d", 6, 8),
            ("e", "e", 6, 8),
            ("f", "f", 0, 1),
            ("g", "g", 3, 5),
        ],
        [
            ("i1", "a"), ("a", "pa"),
            ("i2", "b"), ("b", "pb"), ("b", "pe"),
            ("pa", "c"), ("c", "qc"),
            ("pb", "d"), ("d", "qd"),
            ("qc", "g"), ("qd", "g"), ("g", "og"),
            ("pe", "e"), ("e", "pf"),
            ("pf", "f"), ("f", "of"),
        ],
        {"i1": 1, "i2": 1},
        {"og": 1, "of": 1},
    )


def n3() -> TimePetriNet:
    return _net(
        "n3",
        ["i", "u1", "u2", "l1", "l2", "o"],
        [
            ("a1", "a", 0, 0),
            ("a2", "a", 0, 0),
            ("a3", "a", 0, 0),
            ("b", "b", 100, 100),
            ("a4", "a", 0, 0),
            ("a5", "a", 0, 0),
        ],
        [
            ("i", "a1"), ("a1", "u1"), ("u1", "a2"), ("a2", "u2"), ("u2", "a3"), ("a3", "o"),
            ("i", "b"), ("b", "l1"), ("l1", "a4"), ("a4", "l2"), ("l2", "a5"), ("a5", "o"),
        ],
        {"i": 1},
        {"o": 1},
    )


ALL = {
    "example1": example1,
    "example3": example3,
    "example4": example4,
    "n1": n1,
    "n2": n2,
    "n3": n3,
}
