"""Brute-force reference answers for small instances.

Everything here enumerates a rational grid and is meant for processes with
a handful of events. The size guard (default 8 events) can be raised with
the ``TIMED_ALIGN_GUARD`` environment variable.
"""

from __future__ import annotations

import heapq
import math
import os
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction

from .causal import (
    CausalProcess,
    TimingFunction,
    delay_distance,
    flow,
    is_valid_timing,
    manhattan,
    toe,
)
from .net import TimePetriNet
from .rational import INF, to_time

DEFAULT_GUARD = 8


class SizeGuardExceeded(ValueError):
    pass


class NoFeasibleTiming(ValueError):
    pass


def size_guard() -> int:
    raw = os.environ.get("TIMED_ALIGN_GUARD")
    return int(raw) if raw else DEFAULT_GUARD


def _guard(cp: CausalProcess) -> None:
    limit = size_guard()
    if len(cp.events) > limit:
        raise SizeGuardExceeded(f"{len(cp.events)} events exceed the oracle guard of {limit}")


@dataclass(frozen=True)
class GridSpec:
    step: Fraction = Fraction(1)
    horizon: Fraction = Fraction(20)

    def __post_init__(self) -> None:
        object.__setattr__(self, "step", to_time(self.step))
        object.__setattr__(self, "horizon", to_time(self.horizon))
        if self.step <= 0:
            raise ValueError("grid step must be positive")
        if self.horizon < 0:
            raise ValueError("grid horizon must be nonnegative")

    @classmethod
    def for_instance(cls, net: TimePetriNet, cp: CausalProcess, sigma: Mapping[str, object]) -> GridSpec:
        """Step = 1/lcm of all denominators; a generous horizon from the data."""
        sig = {e: to_time(v) for e, v in sigma.items()}
        values = list(sig.values())
        for e in cp.events:
            t = cp.hom[e]
            values.append(net.eft(t))
            if net.lft(t) != INF:
                values.append(net.lft(t))
        den = 1
        for v in values:
            den = math.lcm(den, Fraction(v).denominator)
        f = flow(cp, sig)
        horizon = max([Fraction(0)] + list(sig.values()))
        horizon += sum((net.eft(cp.hom[e]) + abs(f[e]) for e in cp.events), Fraction(0))
        return cls(Fraction(1, den), horizon)


def enumerate_valid_timings(
    net: TimePetriNet, cp: CausalProcess, grid: GridSpec, *, method: str = "general"
) -> Iterator[TimingFunction]:
    """Every valid timing with all stamps on the grid and at most ``grid.horizon``.

    Candidates are generated event by event (index order) inside
    ``[enabling + Eft, enabling + Lft]``, which every valid timing of a 1-safe
    net satisfies, and then filtered by :func:`is_valid_timing`.
    """
    _guard(cp)
    events = cp.events
    step = grid.step
    tau: TimingFunction = {}

    def rec(i: int) -> Iterator[TimingFunction]:
        if i == len(events):
            if is_valid_timing(net, cp, tau, method=method):
                yield dict(tau)
            return
        ev = events[i]
        tr = cp.hom[ev]
        start = toe(net, cp, tau, cp.preset(ev), tr)
        lo = start + net.eft(tr)
        hi = min(start + net.lft(tr), grid.horizon)
        k = math.ceil(lo / step)
        while k * step <= hi:
            tau[ev] = k * step
            yield from rec(i + 1)
            k += 1
        tau.pop(ev, None)

    yield from rec(0)


def _metric(name: str) -> str:
    aliases = {"d_t": "d_t", "stamp": "d_t", "d_theta": "d_theta", "delay": "d_theta"}
    try:
        return aliases[name]
    except KeyError:
        raise ValueError(f"unknown metric {name!r}") from None


def brute_align(
    net: TimePetriNet,
    cp: CausalProcess,
    sigma: Mapping[str, object],
    metric: str,
    grid: GridSpec | None = None,
) -> tuple[Fraction, TimingFunction]:
    """Best valid grid timing under ``d_t`` or ``d_theta``; first found wins ties."""
    metric = _metric(metric)
    grid = grid or GridSpec.for_instance(net, cp, sigma)
    sig = {e: to_time(v) for e, v in sigma.items()}
    f_sig = flow(cp, sig) if metric == "d_theta" else None
    best: tuple[Fraction, TimingFunction] | None = None
    for tau in enumerate_valid_timings(net, cp, grid):
        if metric == "d_t":
            cost = manhattan(tau, sig)
        else:
            cost = manhattan(flow(cp, tau), f_sig)  # type: ignore[arg-type]
        if best is None or cost < best[0]:
            best = (cost, tau)
    if best is None:
        raise NoFeasibleTiming("no valid timing on the grid")
    return best


def mixed_distance(
    cp: CausalProcess,
    t1: Mapping[str, object],
    t2: Mapping[str, object],
    grid: GridSpec | None = None,
) -> Fraction:
    """Distance allowing both stamp and delay moves.

    Any move sequence collapses to one net delay ``d_e`` plus one net stamp
    per event, so the distance is the minimum over grid vectors ``d`` of
    ``sum |d_e| + sum |delta_e - D_e|`` with ``D_e`` the sum of ``d`` over the
    causal past of ``e`` (inclusive) and ``delta = t2 - t1``. Searched by
    branch and bound starting from the pure-stamp solution.
    """
    _guard(cp)
    a = {e: to_time(v) for e, v in t1.items()}
    b = {e: to_time(v) for e, v in t2.items()}
    if set(a) != set(b) or set(a) != set(cp.events):
        raise ValueError("timing functions must be defined on the events of the process")
    step = grid.step if grid else Fraction(1)
    delta = [b[e] - a[e] for e in cp.events]
    if any((d / step).denominator != 1 for d in delta):
        raise ValueError("differences are not on the grid")
    delta_k = [int(d / step) for d in delta]
    n = len(delta_k)
    anc = [[cp.index[x] for x in cp.ancestors(e)] for e in cp.events]

    best = sum(abs(d) for d in delta_k)
    dvec = [0] * n

    def rec(i: int, partial: int) -> None:
        nonlocal best
        if i == n:
            best = min(best, partial)
            return
        base = sum(dvec[j] for j in anc[i])
        target = delta_k[i] - base
        # candidate net delays by increasing |d|; |d| + |target - d| is minimal for d between 0 and target
        budget = best - partial
        for mag in range(budget):
            for d in ((0,) if mag == 0 else (mag, -mag)):
                cost = abs(d) + abs(target - d)
                if partial + cost >= best:
                    continue
                dvec[i] = d
                rec(i + 1, partial + cost)
        dvec[i] = 0

    rec(0, 0)
    return best * step


def mixed_distance_search(
    cp: CausalProcess,
    t1: Mapping[str, object],
    t2: Mapping[str, object],
    grid: GridSpec | None = None,
    *,
    max_states: int = 200_000,
) -> Fraction:
    """Cross-check for :func:`mixed_distance`: shortest path over raw moves.

    Moves are single grid steps ``stamp(+-step, e)`` and ``delay(+-step, e)``,
    each costing ``step``; bigger moves decompose into these at equal cost.
    """
    _guard(cp)
    step = grid.step if grid else Fraction(1)
    events = cp.events
    start = tuple(int(to_time(t1[e]) / step) for e in events)
    goal = tuple(int(to_time(t2[e]) / step) for e in events)
    desc = [[cp.index[x] for x in events if x == e or cp.precedes(e, x)] for e in events]
    dist = {start: 0}
    heap = [(0, start)]
    while heap:
        d, s = heapq.heappop(heap)
        if s == goal:
            return d * step
        if d > dist[s]:
            continue
        if len(dist) > max_states:
            raise SizeGuardExceeded("move search exceeded its state budget")
        for i in range(len(events)):
            for sign in (1, -1):
                moved = list(s)
                moved[i] += sign
                targets = [tuple(moved)]
                shifted = list(s)
                for j in desc[i]:
                    shifted[j] += sign
                targets.append(tuple(shifted))
                for nxt in targets:
                    if d + 1 < dist.get(nxt, d + 2):
                        dist[nxt] = d + 1
                        heapq.heappush(heap, (d + 1, nxt))
    raise AssertionError("goal unreachable")


def upper_bounds(cp: CausalProcess, t1: Mapping[str, object], t2: Mapping[str, object]) -> tuple[Fraction, Fraction]:
    """``(d_t, d_theta)`` between two timings; both bound the mixed distance."""
    return manhattan(t1, t2), delay_distance(cp, t1, t2)
