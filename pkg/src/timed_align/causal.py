"""Causal processes of time Petri nets, timing/flow functions and timing validity."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .net import VALID, NetError, TimePetriNet, Verdict, enabled, is_extended_free_choice
from .rational import format_time, to_time

TimingFunction = dict[str, Fraction]
FlowFunction = dict[str, Fraction]


class ProcessError(ValueError):
    """Malformed causal process, or a process that does not belong to the given net."""


class UnrollError(ProcessError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class CausalProcess:
    """A causal net ``(B, E, G)`` with its homomorphism ``hom`` into a net.

    ``events`` is kept in a topological order of ``G``; the position in that
    tuple is the event's stable index used for all tie-breaks.
    """

    conditions: tuple[str, ...]
    events: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    hom: Mapping[str, str]
    min_conditions: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "conditions", tuple(self.conditions))
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        object.__setattr__(self, "min_conditions", frozenset(self.min_conditions))
        b, e = set(self.conditions), set(self.events)
        if len(b) != len(self.conditions) or len(e) != len(self.events) or b & e:
            raise ProcessError("condition and event ids must be distinct")
        for src, dst in self.edges:
            if not ((src in b and dst in e) or (src in e and dst in b)):
                raise ProcessError(f"edge {src} -> {dst} does not join a condition and an event")
        for c in self.conditions:
            if len(self._producers[c]) > 1 or len(self._consumers[c]) > 1:
                raise ProcessError(f"condition {c} has more than one input or output event")
        mins = {c for c in self.conditions if not self._producers[c]}
        if mins != set(self.min_conditions):
            raise ProcessError("min_conditions must be exactly the conditions without input event")
        missing = (b | e) - set(self.hom)
        if missing:
            raise ProcessError(f"hom undefined on {sorted(missing)}")
        pos = self.index
        for ev in self.events:
            for c in self.preset(ev):
                src = self.producer(c)
                if src is not None and pos[src] >= pos[ev]:
                    raise ProcessError("events are not listed in a topological order (or G is cyclic)")

    @cached_property
    def _producers(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {c: [] for c in self.conditions}
        for src, dst in self.edges:
            if dst in out:
                out[dst].append(src)
        return out

    @cached_property
    def _consumers(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {c: [] for c in self.conditions}
        for src, dst in self.edges:
            if src in out:
                out[src].append(dst)
        return out

    @cached_property
    def _pre(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {ev: [] for ev in self.events}
        for src, dst in self.edges:
            if dst in out:
                out[dst].append(src)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def _post(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {ev: [] for ev in self.events}
        for src, dst in self.edges:
            if src in out:
                out[src].append(dst)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def index(self) -> dict[str, int]:
        return {ev: i for i, ev in enumerate(self.events)}

    def preset(self, event: str) -> tuple[str, ...]:
        return self._pre[event]

    def postset(self, event: str) -> tuple[str, ...]:
        return self._post[event]

    def producer(self, condition: str) -> str | None:
        ps = self._producers[condition]
        return ps[0] if ps else None

    def consumer(self, condition: str) -> str | None:
        cs = self._consumers[condition]
        return cs[0] if cs else None

    @cached_property
    def predecessors(self) -> dict[str, tuple[str, ...]]:
        """Immediate predecessor events ``••e``."""
        out = {}
        for ev in self.events:
            preds = {self.producer(c) for c in self.preset(ev)} - {None}
            out[ev] = tuple(sorted(preds, key=self.index.__getitem__))  # type: ignore[arg-type]
        return out

    @cached_property
    def _ancestor_bits(self) -> dict[str, int]:
        bits: dict[str, int] = {}
        for ev in self.events:
            acc = 0
            for p in self.predecessors[ev]:
                acc |= bits[p] | (1 << self.index[p])
            bits[ev] = acc
        return bits

    def precedes(self, e1: str, e2: str) -> bool:
        """Strict causal order ``e1 <_G e2``."""
        return bool(self._ancestor_bits[e2] >> self.index[e1] & 1)

    def ancestors(self, event: str) -> frozenset[str]:
        bits = self._ancestor_bits[event]
        return frozenset(ev for ev in self.events if bits >> self.index[ev] & 1)

    def labels(self, net: TimePetriNet) -> tuple[str, ...]:
        return tuple(net.label(self.hom[e]) for e in self.events)

    def run(self) -> tuple[str, ...]:
        """Transition sequence of the events in index order."""
        return tuple(self.hom[e] for e in self.events)


def check_process(net: TimePetriNet, cp: CausalProcess) -> None:
    """Raise :class:`ProcessError` unless ``cp.hom`` is a homomorphism into ``net``."""
    places, trans = set(net.places), set(net.transition)
    for c in cp.conditions:
        if cp.hom[c] not in places:
            raise ProcessError(f"condition {c} maps to {cp.hom[c]}, not a place")
    for ev in cp.events:
        t = cp.hom[ev]
        if t not in trans:
            raise ProcessError(f"event {ev} maps to {t}, not a transition")
        pre = [cp.hom[c] for c in cp.preset(ev)]
        post = [cp.hom[c] for c in cp.postset(ev)]
        if len(pre) != len(set(pre)) or set(pre) != net.preset(t):
            raise ProcessError(f"preset of {ev} is not in bijection with the preset of {t}")
        if len(post) != len(set(post)) or set(post) != net.postset(t):
            raise ProcessError(f"postset of {ev} is not in bijection with the postset of {t}")
    mins = Counter(cp.hom[c] for c in cp.min_conditions)
    if dict(mins) != dict(net.initial_marking):
        raise ProcessError("minimal conditions are not in bijection with the initial marking")


def unroll(net: TimePetriNet, untimed_run: Sequence[str], *, require_final: bool = True) -> CausalProcess:
    """Causal process of an untimed firing sequence of a 1-safe net.

    Every time a place is refilled it gets a fresh condition. Event ``i``
    (0-based position in the run) is named ``e{i+1}``.
    """
    conditions: list[str] = []
    edges: list[tuple[str, str]] = []
    hom: dict[str, str] = {}
    current: dict[str, str] = {}

    def fresh(place: str) -> str:
        c = f"b{len(conditions)}"
        conditions.append(c)
        hom[c] = place
        return c

    for p in net.places:
        n = net.initial_marking.get(p, 0)
        if n > 1:
            raise UnrollError(f"initial marking is not 1-safe at {p}", -1)
        if n:
            current[p] = fresh(p)
    mins = frozenset(current.values())
    events = []
    for i, t in enumerate(untimed_run):
        if t not in net.transition:
            raise UnrollError(f"unknown transition {t} at index {i}", i)
        missing = [p for p in sorted(net.preset(t)) if p not in current]
        if missing:
            raise UnrollError(f"run not fireable at index {i}: {t} lacks tokens in {missing}", i)
        ev = f"e{i + 1}"
        events.append(ev)
        hom[ev] = t
        for p in sorted(net.preset(t)):
            edges.append((current.pop(p), ev))
        for p in sorted(net.postset(t)):
            if p in current:
                raise UnrollError(f"run is not 1-safe: {p} receives a second token at index {i}", i)
            c = fresh(p)
            edges.append((ev, c))
            current[p] = c
    if require_final and not net.is_final({p: 1 for p in current}):
        raise UnrollError("run does not end in the final marking", len(untimed_run))
    return CausalProcess(tuple(conditions), tuple(events), tuple(edges), hom, mins)


def timing_from_sequence(cp: CausalProcess, timestamps: Sequence[object]) -> TimingFunction:
    """Assign timestamps to events in index order (the run order for unrolled processes)."""
    if len(timestamps) != len(cp.events):
        raise ValueError(f"{len(timestamps)} timestamps for {len(cp.events)} events")
    return {e: to_time(ts) for e, ts in zip(cp.events, timestamps)}


def _check_total(cp: CausalProcess, tau: Mapping[str, object]) -> None:
    if set(tau) != set(cp.events):
        raise ValueError("timing function must be defined exactly on the events")


def cut(cp: CausalProcess, configuration: Iterable[str]) -> frozenset[str]:
    """Conditions present after firing a downward-closed set of events."""
    conf = set(configuration)
    unknown = conf - set(cp.events)
    if unknown:
        raise ProcessError(f"unknown events {sorted(unknown)}")
    for ev in conf:
        for p in cp.predecessors[ev]:
            if p not in conf:
                raise ProcessError(f"event set is not downward-closed: {ev} needs {p}")
    produced = {c for ev in conf for c in cp.postset(ev)}
    consumed = {c for ev in conf for c in cp.preset(ev)}
    return frozenset((produced | cp.min_conditions) - consumed)


def toe(
    net: TimePetriNet,
    cp: CausalProcess,
    tau: Mapping[str, Fraction],
    conditions: Iterable[str],
    t: str,
) -> Fraction:
    """Time of enabling of ``t`` given the conditions ``conditions``."""
    pre = net.preset(t)
    best = Fraction(0)
    for c in conditions:
        if c in cp.min_conditions or cp.hom[c] not in pre:
            continue
        src = cp.producer(c)
        assert src is not None
        best = max(best, tau[src])
    return best


def _latest_pred(cp: CausalProcess, tau: Mapping[str, Fraction], ev: str) -> Fraction:
    return max((tau[p] for p in cp.predecessors[ev]), default=Fraction(0))


def flow(cp: CausalProcess, tau: Mapping[str, object]) -> FlowFunction:
    """Delay of each event since its latest causal predecessor (or since 0)."""
    _check_total(cp, tau)
    t = {e: to_time(v) for e, v in tau.items()}
    out = {}
    for ev in cp.events:
        preds = cp.predecessors[ev]
        out[ev] = t[ev] - max([t[p] for p in preds] + [Fraction(0)]) if preds else t[ev]
    return out


def unflow(cp: CausalProcess, f: Mapping[str, object]) -> TimingFunction:
    _check_total(cp, f)
    tau: TimingFunction = {}
    for ev in cp.events:
        tau[ev] = to_time(f[ev]) + _latest_pred(cp, tau, ev)
    return tau


def earlier(cp: CausalProcess, tau: Mapping[str, Fraction], event: str) -> frozenset[str]:
    """Events strictly earlier in time, plus equal-time causal predecessors.

    Raises :class:`ProcessError` if the result is not downward-closed, which
    happens only when ``tau`` decreases along ``G``.
    """
    x = tau[event]
    out = frozenset(
        e for e in cp.events if tau[e] < x or (tau[e] == x and cp.precedes(e, event))
    )
    for e in out:
        for p in cp.predecessors[e]:
            if p not in out:
                raise ProcessError(f"Earlier({event}) is not downward-closed: timing not monotone")
    return out


def _marking_of(cp: CausalProcess, conditions: Iterable[str]) -> dict[str, int]:
    return dict(Counter(cp.hom[c] for c in conditions))


def is_valid_timing(
    net: TimePetriNet,
    cp: CausalProcess,
    tau: Mapping[str, object],
    *,
    method: str = "auto",
) -> Verdict:
    """Decide whether ``tau`` is a valid timing of ``cp``.

    ``method="general"`` checks every transition enabled at ``Cut(Earlier(e))``;
    ``"efc"`` uses the per-event characterisation for extended free choice nets
    (deadline = smallest Lft among transitions with the same preset);
    ``"auto"`` picks ``"efc"`` when the net allows it. Both add the
    completeness check on the final cut.
    """
    check_process(net, cp)
    _check_total(cp, tau)
    t = {e: to_time(v) for e, v in tau.items()}
    if method == "auto":
        method = "efc" if is_extended_free_choice(net) else "general"
    if method == "efc" and not is_extended_free_choice(net):
        raise NetError("the efc validity check needs an extended free choice net")
    if method not in {"efc", "general"}:
        raise ValueError(f"unknown method {method!r}")

    enabling = {ev: toe(net, cp, t, cp.preset(ev), cp.hom[ev]) for ev in cp.events}
    for ev in cp.events:
        tr = cp.hom[ev]
        if t[ev] < enabling[ev] + net.eft(tr):
            return Verdict(
                False, ev, "1",
                f"{tr} fires {format_time(t[ev] - enabling[ev])} after enabling, "
                f"before its eft {format_time(net.eft(tr))}",
            )
    for ev in cp.events:
        tr = cp.hom[ev]
        if method == "efc":
            if t[ev] - enabling[ev] > net.group_lft(tr):
                return Verdict(
                    False, ev, "2",
                    f"{tr} fires {format_time(t[ev] - enabling[ev])} after enabling, "
                    f"past the deadline {format_time(net.group_lft(tr))} of its conflict group",
                )
            continue
        c_e = cut(cp, earlier(cp, t, ev))
        for u in sorted(enabled(net, _marking_of(cp, c_e))):
            deadline = toe(net, cp, t, c_e, u) + net.lft(u)
            if t[ev] > deadline:
                return Verdict(
                    False, ev, "2",
                    f"firing at {format_time(t[ev])} overruns the deadline "
                    f"{format_time(deadline)} of {u}",
                )
    if cp.events:
        last = max(t.values())
        final = cut(cp, cp.events)
        for u in sorted(enabled(net, _marking_of(cp, final))):
            deadline = toe(net, cp, t, final, u) + net.lft(u)
            if last > deadline:
                return Verdict(
                    False, u, "3",
                    f"process incomplete: {u} stays enabled past its deadline "
                    f"{format_time(deadline)} (last event at {format_time(last)})",
                )
    return VALID


def is_linear(cp: CausalProcess) -> bool:
    for i, ev in enumerate(cp.events):
        if len(cp.preset(ev)) > 1 or len(cp.postset(ev)) > 1:
            return False
        if i and cp.predecessors[ev] != (cp.events[i - 1],):
            return False
    return True


def manhattan(t1: Mapping[str, object], t2: Mapping[str, object]) -> Fraction:
    if set(t1) != set(t2):
        raise ValueError("timing functions have different domains")
    return sum((abs(to_time(t1[e]) - to_time(t2[e])) for e in t1), Fraction(0))


def delay_distance(cp: CausalProcess, t1: Mapping[str, object], t2: Mapping[str, object]) -> Fraction:
    return manhattan(flow(cp, t1), flow(cp, t2))
