"""Time Petri nets: data model, firing rule with clocks, timed replay, simulation."""

from __future__ import annotations

import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional

from .rational import INF, Bound, format_time, to_bound, to_time

Marking = Mapping[str, int]


class NetError(ValueError):
    """Malformed net or marking."""


class FiringError(ValueError):
    """A transition is not fireable after the requested delay.

    ``condition`` is one of ``"enabled"``, ``"interval"`` or ``"urgency"``.
    """

    def __init__(self, condition: str, message: str):
        super().__init__(message)
        self.condition = condition


class SimulationIncomplete(RuntimeError):
    """Random simulation stopped before reaching the final marking."""

    def __init__(self, message: str, partial: list[tuple[str, Fraction]]):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class Transition:
    id: str
    label: str
    eft: Fraction
    lft: Bound = INF

    def __post_init__(self) -> None:
        object.__setattr__(self, "eft", to_time(self.eft))
        object.__setattr__(self, "lft", to_bound(self.lft))
        if self.eft < 0:
            raise NetError(f"transition {self.id}: negative eft")
        if self.eft > self.lft:
            raise NetError(
                f"transition {self.id}: empty static interval "
                f"[{format_time(self.eft)}, {format_time(self.lft)}]"
            )


def _drop_zeros(marking: Marking) -> dict[str, int]:
    return {p: n for p, n in marking.items() if n}


@dataclass(frozen=True)
class TimePetriNet:
    places: tuple[str, ...]
    transitions: tuple[Transition, ...]
    arcs: tuple[tuple[str, str], ...]
    initial_marking: Mapping[str, int] = field(default_factory=dict)
    final_marking: Mapping[str, int] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "places", tuple(self.places))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        object.__setattr__(self, "arcs", tuple(tuple(a) for a in self.arcs))
        object.__setattr__(self, "initial_marking", _drop_zeros(self.initial_marking))
        object.__setattr__(self, "final_marking", _drop_zeros(self.final_marking))
        places = set(self.places)
        tids = [t.id for t in self.transitions]
        if len(places) != len(self.places):
            raise NetError("duplicate place id")
        if len(set(tids)) != len(tids):
            raise NetError("duplicate transition id")
        if places & set(tids):
            raise NetError(f"ids used as both place and transition: {sorted(places & set(tids))}")
        for src, dst in self.arcs:
            if not ((src in places and dst in tids) or (src in tids and dst in places)):
                raise NetError(f"dangling arc {src} -> {dst}")
        if len(set(self.arcs)) != len(self.arcs):
            raise NetError("duplicate arc (weighted arcs are not supported)")
        for which, m in (("initial", self.initial_marking), ("final", self.final_marking)):
            for p, n in m.items():
                if p not in places:
                    raise NetError(f"{which} marking names unknown place {p}")
                if n < 0:
                    raise NetError(f"{which} marking has negative count at {p}")

    @cached_property
    def transition(self) -> dict[str, Transition]:
        return {t.id: t for t in self.transitions}

    @cached_property
    def _pre(self) -> dict[str, frozenset[str]]:
        pre: dict[str, set[str]] = {t.id: set() for t in self.transitions}
        for src, dst in self.arcs:
            if dst in pre:
                pre[dst].add(src)
        return {t: frozenset(ps) for t, ps in pre.items()}

    @cached_property
    def _post(self) -> dict[str, frozenset[str]]:
        post: dict[str, set[str]] = {t.id: set() for t in self.transitions}
        for src, dst in self.arcs:
            if src in post:
                post[src].add(dst)
        return {t: frozenset(ps) for t, ps in post.items()}

    @cached_property
    def consumers(self) -> dict[str, tuple[str, ...]]:
        """place -> transitions having it in their preset (net order)."""
        out: dict[str, list[str]] = {p: [] for p in self.places}
        for t in self.transitions:
            for p in self._pre[t.id]:
                out[p].append(t.id)
        return {p: tuple(ts) for p, ts in out.items()}

    def preset(self, t: str) -> frozenset[str]:
        return self._pre[t]

    def postset(self, t: str) -> frozenset[str]:
        return self._post[t]

    def eft(self, t: str) -> Fraction:
        return self.transition[t].eft

    def lft(self, t: str) -> Bound:
        return self.transition[t].lft

    def label(self, t: str) -> str:
        return self.transition[t].label

    def conflict_group(self, t: str) -> tuple[str, ...]:
        """Transitions with exactly the same preset as ``t`` (including ``t``)."""
        pre = self._pre[t]
        return tuple(u.id for u in self.transitions if self._pre[u.id] == pre)

    @cached_property
    def _group_lft(self) -> dict[str, Bound]:
        return {t.id: min(self.lft(u) for u in self.conflict_group(t.id)) for t in self.transitions}

    def group_lft(self, t: str) -> Bound:
        """Smallest Lft over :meth:`conflict_group`; the real deadline of ``t`` in an EFC net."""
        return self._group_lft[t]

    def is_final(self, marking: Marking) -> bool:
        return _drop_zeros(marking) == dict(self.final_marking)

    def relabel(self, mapping: Mapping[str, str]) -> TimePetriNet:
        ts = tuple(
            Transition(t.id, mapping.get(t.label, t.label), t.eft, t.lft) for t in self.transitions
        )
        return TimePetriNet(
            self.places, ts, self.arcs, self.initial_marking, self.final_marking, self.name
        )


@dataclass(frozen=True)
class TimedTrace:
    """Observed timed word: ``(action, timestamp)`` pairs with nondecreasing stamps.

    ``transitions`` optionally pins each event to a transition id, for nets
    where labels are ambiguous.
    """

    events: tuple[tuple[str, Fraction], ...]
    transitions: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        evs = tuple((str(a), to_time(ts)) for a, ts in self.events)
        object.__setattr__(self, "events", evs)
        for i, (a, ts) in enumerate(evs):
            if not a:
                raise ValueError(f"event {i}: empty action")
            if i and ts < evs[i - 1][1]:
                raise ValueError("timestamps must be nondecreasing")
        if self.transitions is not None and not evs:
            object.__setattr__(self, "transitions", None)  # nothing to pin
        if self.transitions is not None:
            object.__setattr__(self, "transitions", tuple(self.transitions))
            if len(self.transitions) != len(evs):
                raise ValueError("transition run and events differ in length")

    @classmethod
    def of(cls, *pairs: tuple[str, object]) -> TimedTrace:
        return cls(tuple((a, to_time(ts)) for a, ts in pairs))

    @property
    def actions(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.events)

    @property
    def timestamps(self) -> tuple[Fraction, ...]:
        return tuple(ts for _, ts in self.events)

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class NetState:
    marking: Mapping[str, int]
    clocks: Mapping[str, Fraction]


@dataclass(frozen=True)
class Verdict:
    """Outcome of a validity check. Truthy iff valid.

    ``where`` locates the first violation (a run index or an event id),
    ``condition`` names the failed check.
    """

    valid: bool
    where: object = None
    condition: Optional[str] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid

    def __str__(self) -> str:
        if self.valid:
            return "valid"
        return f"invalid at {self.where} ({self.condition}): {self.reason}"


VALID = Verdict(True)


def _check_marking(net: TimePetriNet, marking: Marking) -> None:
    unknown = set(marking) - set(net.places)
    if unknown:
        raise NetError(f"marking names unknown places {sorted(unknown)}")


def enabled(net: TimePetriNet, marking: Marking) -> frozenset[str]:
    _check_marking(net, marking)
    return frozenset(
        t.id for t in net.transitions if all(marking.get(p, 0) > 0 for p in net.preset(t.id))
    )


def initial_state(net: TimePetriNet) -> NetState:
    return NetState(dict(net.initial_marking), {t: Fraction(0) for t in enabled(net, net.initial_marking)})


def fire(net: TimePetriNet, state: NetState, t: str, theta: object) -> NetState:
    """Fire ``t`` after delay ``theta`` from ``state``; raises :class:`FiringError`."""
    theta = to_time(theta)
    if theta < 0:
        raise FiringError("interval", f"negative delay {theta}")
    if t not in net.transition:
        raise FiringError("enabled", f"unknown transition {t}")
    marking = state.marking
    now_enabled = enabled(net, marking)
    if t not in now_enabled:
        raise FiringError("enabled", f"{t} is not enabled")
    for u in sorted(now_enabled):
        if state.clocks[u] + theta > net.lft(u):
            raise FiringError(
                "urgency",
                f"waiting {format_time(theta)} overruns the deadline of {u} "
                f"(clock {format_time(state.clocks[u])}, lft {format_time(net.lft(u))})",
            )
    clock = state.clocks[t] + theta
    if clock < net.eft(t):
        raise FiringError(
            "interval",
            f"{t} fires too early (clock {format_time(clock)} < eft {format_time(net.eft(t))})",
        )
    intermediate = dict(marking)
    for p in net.preset(t):
        intermediate[p] -= 1
    after = dict(intermediate)
    for p in net.postset(t):
        after[p] = after.get(p, 0) + 1
    persisted = enabled(net, intermediate)
    clocks = {}
    for u in enabled(net, after):
        clocks[u] = state.clocks[u] + theta if u in persisted else Fraction(0)
    return NetState(_drop_zeros(after), clocks)


def replay_timed(net: TimePetriNet, run: Iterable[tuple[str, object]]) -> Verdict:
    """Check that a run of ``(transition, timestamp)`` pairs is a timed execution ending in M_f."""
    state = initial_state(net)
    now = Fraction(0)
    for i, (t, ts) in enumerate(run):
        ts = to_time(ts)
        if ts < now:
            return Verdict(False, i, "order", "timestamps decrease")
        try:
            state = fire(net, state, t, ts - now)
        except FiringError as exc:
            return Verdict(False, i, exc.condition, str(exc))
        now = ts
        unsafe = [p for p, n in state.marking.items() if n > 1]
        if unsafe:
            return Verdict(False, i, "safety", f"places {sorted(unsafe)} hold several tokens")
    if not net.is_final(state.marking):
        return Verdict(False, None, "final", "run does not end in the final marking")
    return VALID


def is_extended_free_choice(net: TimePetriNet) -> bool:
    pres = [net.preset(t.id) for t in net.transitions]
    for i, a in enumerate(pres):
        for b in pres[i + 1 :]:
            if a & b and a != b:
                return False
    return True


def is_one_safe_marking(marking: Marking) -> bool:
    return all(n <= 1 for n in marking.values())


def simulate_random(
    net: TimePetriNet,
    seed: int,
    max_events: int,
    *,
    step: object = Fraction(1, 2),
    open_span: object = 5,
    min_events: int = 0,
) -> list[tuple[str, Fraction]]:
    """Random timed run from M₀, stopping as soon as M_f is reached.

    Each step picks a fireable transition uniformly, then a delay uniformly
    from the grid ``lower + k*step`` inside the urgency-feasible window
    (plus the window's right end). Windows unbounded on the right are cut
    at ``lower + open_span``. ``min_events`` keeps going past M_f.
    """
    rng = random.Random(seed)
    step = to_time(step)
    open_span = to_time(open_span)
    state = initial_state(net)
    now = Fraction(0)
    run: list[tuple[str, Fraction]] = []
    while True:
        if net.is_final(state.marking) and len(run) >= min_events:
            return run
        if len(run) >= max_events:
            raise SimulationIncomplete(f"no final marking within {max_events} events", run)
        live = sorted(state.clocks)
        deadline = min((net.lft(u) - state.clocks[u] for u in live), default=INF)
        choices = []
        for u in live:
            lo = max(Fraction(0), net.eft(u) - state.clocks[u])
            if lo <= deadline:
                choices.append((u, lo))
        if not choices:
            if net.is_final(state.marking):
                return run
            raise SimulationIncomplete("deadlock before the final marking", run)
        t, lo = rng.choice(choices)
        hi = deadline if deadline != INF else lo + open_span
        grid = [lo + k * step for k in range(int((hi - lo) / step) + 1)]
        if grid[-1] != hi:
            grid.append(hi)  # type: ignore[arg-type]
        theta = rng.choice(grid)
        state = fire(net, state, t, theta)
        now += theta
        run.append((t, now))


def untimed_successors(net: TimePetriNet, marking: Marking) -> list[tuple[str, dict[str, int]]]:
    out = []
    for t in net.transitions:
        if all(marking.get(p, 0) > 0 for p in net.preset(t.id)):
            m = dict(marking)
            for p in net.preset(t.id):
                m[p] -= 1
            for p in net.postset(t.id):
                m[p] = m.get(p, 0) + 1
            out.append((t.id, _drop_zeros(m)))
    return out


def resolve_labels(net: TimePetriNet, actions: Sequence[str], *, limit: int = 100_000) -> list[str]:
    """First (in net transition order) untimed firing sequence from M₀ to M_f with these labels."""
    target = len(actions)
    stack: list[tuple[dict[str, int], list[str]]] = [(dict(net.initial_marking), [])]
    seen = 0
    while stack:
        marking, run = stack.pop()
        seen += 1
        if seen > limit:
            break
        i = len(run)
        if i == target:
            if net.is_final(marking):
                return run
            continue
        nxt = [(t, m) for t, m in untimed_successors(net, marking) if net.label(t) == actions[i]]
        for t, m in reversed(nxt):
            stack.append((m, run + [t]))
    raise NetError(f"no run of the net carries the labels {list(actions)}")
