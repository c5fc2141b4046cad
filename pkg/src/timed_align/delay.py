"""Delay-only alignment on extended free choice nets.

Each event's delay since enabling is clamped independently into
``[Eft, min Lft of its conflict group]``; events are consumed in order of
their deadline (the *soon* set) so the resulting process stays complete.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction

from .causal import CausalProcess, FlowFunction, TimingFunction, check_process, flow, toe
from .net import TimePetriNet, is_extended_free_choice
from .rational import Bound, clamp, format_time, to_time


class NotEFC(ValueError):
    """The net is not extended free choice."""


class NoValidTiming(ValueError):
    """The algorithm cannot extend the process without breaking a deadline."""


@dataclass(frozen=True)
class FiringDeadline:
    t: str
    eft: Fraction
    l: Bound
    toe: Fraction

    @property
    def deadline(self) -> Bound:
        return self.toe + self.l


@dataclass(frozen=True)
class DelayAlignment:
    cost: Fraction
    gamma: TimingFunction
    flow_gamma: FlowFunction
    order: tuple[str, ...] = ()  # events in the order they were timed


def align_delay(net: TimePetriNet, cp: CausalProcess, sigma: Mapping[str, object]) -> DelayAlignment:
    if not is_extended_free_choice(net):
        raise NotEFC(f"net {net.name!r} is not extended free choice")
    check_process(net, cp)
    f_sigma = flow(cp, sigma)
    rank = {t.id: i for i, t in enumerate(net.transitions)}

    curr: dict[str, str] = {}  # place -> condition currently marking it
    for c in cp.min_conditions:
        curr[cp.hom[c]] = c
    gamma: TimingFunction = {}
    f_gamma: FlowFunction = {}
    fd: dict[str, FiringDeadline] = {}

    def entry(t: str) -> FiringDeadline:
        when = toe(net, cp, gamma, (curr[p] for p in net.preset(t)), t)
        return FiringDeadline(t, net.eft(t), net.group_lft(t), when)

    for tr in net.transitions:
        if all(p in curr for p in net.preset(tr.id)):
            fd[tr.id] = entry(tr.id)

    order = []
    for _ in range(len(cp.events)):
        soonest = min(d.deadline for d in fd.values()) if fd else None
        pick = None
        for d in fd.values():
            if d.deadline != soonest:
                continue
            # the event consuming the conditions that enable d.t, if it is an occurrence of d.t
            pre = net.preset(d.t)
            if not pre:
                continue
            ev = cp.consumer(curr[next(iter(pre))])
            if ev is None or cp.hom[ev] != d.t:
                continue
            if pick is None or cp.index[ev] < cp.index[pick[1]]:
                pick = (d, ev)
        if pick is None:
            blocked = sorted(d.t for d in fd.values() if d.deadline == soonest)
            raise NoValidTiming(
                f"after {len(order)} events the earliest deadline "
                f"({format_time(soonest) if soonest is not None else 'none'}) belongs to "
                f"{blocked}, which the process never fires"
            )
        d, ev = pick
        if d.eft > d.l:
            raise NoValidTiming(
                f"{d.t} can never fire: eft {format_time(d.eft)} exceeds the group deadline {format_time(d.l)}"
            )
        f_gamma[ev] = clamp(f_sigma[ev], d.eft, d.l)
        gamma[ev] = d.toe + f_gamma[ev]
        order.append(ev)
        consumed = {cp.hom[c] for c in cp.preset(ev)}
        for p in consumed:
            del curr[p]
        for c in cp.postset(ev):
            curr[cp.hom[c]] = c
        for t in [t for t in fd if net.preset(t) & consumed]:
            del fd[t]
        touched = {t for c in cp.postset(ev) for t in net.consumers[cp.hom[c]]}
        for t in sorted(touched, key=rank.__getitem__):
            if t not in fd and all(p in curr for p in net.preset(t)):
                fd[t] = entry(t)

    cost = sum((abs(f_gamma[e] - f_sigma[e]) for e in cp.events), Fraction(0))
    return DelayAlignment(cost, {e: gamma[e] for e in cp.events}, {e: f_gamma[e] for e in cp.events}, tuple(order))


def clamp_delay(x: object, lo: object, hi: Bound) -> Fraction:
    return clamp(to_time(x), to_time(lo), hi)
