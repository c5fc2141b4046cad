"""Aligning actions and timestamps together, the naive way.

Untimed candidates come from a best-first search over the synchronous
product of the trace and the untimed net (insertions and deletions cost
``c_A`` each; a substitution is a deletion plus an insertion). Each candidate
inherits the observed timestamps and is then aligned in time; the candidate
with the smallest ``action cost + c_T * time distance`` wins.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

from .causal import is_linear, is_valid_timing, timing_from_sequence, unroll
from .delay import NoValidTiming, NotEFC, align_delay
from .net import NetError, TimedTrace, TimePetriNet, is_extended_free_choice, replay_timed, untimed_successors
from .rational import to_time
from .stamp import StampAlignmentError, align_process


class NoAdmissibleCandidate(ValueError):
    pass


class Move(NamedTuple):
    kind: str  # "match" | "insert" | "delete"
    action: str
    index: Optional[int] = None  # trace position, for match/delete
    transition: Optional[str] = None  # model transition, for match/insert

    def __str__(self) -> str:
        if self.kind == "delete":
            return f"delete({self.index}:{self.action})"
        if self.kind == "insert":
            return f"insert({self.action})"
        return f"match({self.index}:{self.action})"


@dataclass(frozen=True)
class CostConfig:
    c_A: Fraction = Fraction(1)
    c_T: Fraction = Fraction(1)
    k: int = 1
    threshold: bool = False  # keep every run within best + c_A instead of the k best

    def __post_init__(self) -> None:
        object.__setattr__(self, "c_A", to_time(self.c_A))
        object.__setattr__(self, "c_T", to_time(self.c_T))
        if self.c_A <= 0 or self.c_T <= 0:
            raise ValueError("costs must be positive")
        if self.k < 1:
            raise ValueError("k must be at least 1")


@dataclass(frozen=True)
class Candidate:
    run: tuple[str, ...]
    script: tuple[Move, ...]
    action_cost: Fraction


@dataclass(frozen=True)
class GeneralAlignment:
    aligned_word: TimedTrace
    edit_script: tuple[Move, ...]
    action_cost: Fraction
    time_cost: Fraction  # c_T * time_distance
    time_distance: Fraction
    total: Fraction
    metric: str
    model_valid: bool  # the aligned word replays on the net (urgency included)
    considered: int = 0
    skipped: tuple[str, ...] = field(default=(), repr=False)


def _final_reachable(net: TimePetriNet, limit: int = 100_000) -> bool:
    start = tuple(sorted(net.initial_marking.items()))
    seen = {start}
    queue = deque([dict(net.initial_marking)])
    while queue:
        m = queue.popleft()
        if net.is_final(m):
            return True
        for _, nxt in untimed_successors(net, m):
            key = tuple(sorted(nxt.items()))
            if key not in seen:
                if len(seen) >= limit:
                    return True  # too big to decide; let the search run
                seen.add(key)
                queue.append(nxt)
    return False


def untimed_align_kbest(
    net: TimePetriNet,
    word: Sequence[str],
    k: int = 1,
    c_A: object = 1,
    *,
    threshold: bool = False,
    max_nodes: int = 500_000,
) -> list[Candidate]:
    """The ``k`` cheapest distinct runs of the untimed net under insert/delete edits.

    With ``threshold=True`` every run costing at most ``best + c_A`` is
    returned instead. Results are sorted by cost, then by run.
    """
    c_A = to_time(c_A)
    word = list(word)
    if not _final_reachable(net):
        raise NetError("the final marking is unreachable: the net's language is empty")
    tie = itertools.count()
    heap = [(Fraction(0), (), 0, next(tie), dict(net.initial_marking), ())]
    best_seen: dict[tuple, Fraction] = {}
    found: dict[tuple[str, ...], Candidate] = {}
    cutoff: Optional[Fraction] = None
    expanded = 0
    while heap:
        cost, run, pos, _, marking, script = heapq.heappop(heap)
        if cutoff is not None and cost > cutoff:
            break
        key = (run, pos)
        if best_seen.get(key, cost + 1) < cost:
            continue
        if pos == len(word) and net.is_final(marking) and run not in found:
            found[run] = Candidate(run, script, cost)
            if threshold:
                if cutoff is None:
                    cutoff = cost + c_A
            elif len(found) >= k and cutoff is None:
                cutoff = cost
        expanded += 1
        if expanded > max_nodes:
            raise RuntimeError("untimed alignment search exceeded its node budget")

        def push(ncost, nrun, npos, nmarking, move):
            nkey = (nrun, npos)
            if ncost < best_seen.get(nkey, ncost + 1):
                best_seen[nkey] = ncost
                heapq.heappush(heap, (ncost, nrun, npos, next(tie), nmarking, script + (move,)))

        if pos < len(word):
            push(cost + c_A, run, pos + 1, marking, Move("delete", word[pos], pos))
        for t, nxt in untimed_successors(net, marking):
            label = net.label(t)
            if pos < len(word) and label == word[pos]:
                push(cost, run + (t,), pos + 1, nxt, Move("match", label, pos, t))
            push(cost + c_A, run + (t,), pos, nxt, Move("insert", label, None, t))
    out = sorted(found.values(), key=lambda c: (c.action_cost, c.run))
    out = [
        Candidate(c.run, edit_script_for(word, c.run, [net.label(t) for t in c.run], c_A), c.action_cost)
        for c in out
    ]
    return out if threshold else out[:k]


def edit_script_for(word: Sequence[str], run: Sequence[str], labels: Sequence[str], c_A: object = 1) -> tuple[Move, ...]:
    """A cheapest insert/delete script turning ``word`` into the labelled ``run``.

    Among equally cheap scripts the one taking deletions as early as possible
    is returned (then matches, then insertions), so a substitution reads as
    "drop the observed event, insert the model's one" and the inserted event
    inherits the dropped event's stamp.
    """
    c_A = to_time(c_A)
    n, m = len(word), len(run)
    big = c_A * (n + m + 1)
    cost = [[big] * (m + 1) for _ in range(n + 1)]
    cost[n][m] = Fraction(0)
    for i in range(n, -1, -1):
        for j in range(m, -1, -1):
            if i < n:
                cost[i][j] = min(cost[i][j], cost[i + 1][j] + c_A)
            if j < m:
                cost[i][j] = min(cost[i][j], cost[i][j + 1] + c_A)
            if i < n and j < m and word[i] == labels[j]:
                cost[i][j] = min(cost[i][j], cost[i + 1][j + 1])
    out: list[Move] = []
    i = j = 0
    while i < n or j < m:
        here = cost[i][j]
        if i < n and cost[i + 1][j] + c_A == here:
            out.append(Move("delete", word[i], i))
            i += 1
        elif i < n and j < m and word[i] == labels[j] and cost[i + 1][j + 1] == here:
            out.append(Move("match", word[i], i, run[j]))
            i, j = i + 1, j + 1
        else:
            out.append(Move("insert", labels[j], None, run[j]))
            j += 1
    return tuple(out)


def transfer_timestamps(word: TimedTrace, edit_script: Sequence[Move]) -> tuple[list[str], list[Fraction]]:
    """Carry the observed stamps onto the edited run.

    Matched events keep their stamp and deleted ones drop it. Inserted ones
    repeat the stamp of the nearest preceding trace position the script has
    walked past, deleted or not (0 before the first one).
    """
    expected = 0
    last = Fraction(0)
    run: list[str] = []
    sigma: list[Fraction] = []
    for move in edit_script:
        if move.kind in ("match", "delete"):
            if move.index != expected or move.index >= len(word):
                raise ValueError(f"edit script does not walk the trace in order at {move}")
            if word.actions[move.index] != move.action:
                raise ValueError(f"edit script names {move.action!r} but the trace has {word.actions[move.index]!r}")
            expected += 1
            last = word.timestamps[move.index]
            if move.kind == "match":
                run.append(move.transition or move.action)
                sigma.append(last)
        elif move.kind == "insert":
            run.append(move.transition or move.action)
            sigma.append(last)
        else:
            raise ValueError(f"unknown move kind {move.kind!r}")
    if expected != len(word):
        raise ValueError("edit script does not cover the whole trace")
    return run, sigma


def align_general(
    net: TimePetriNet,
    word: TimedTrace,
    config: CostConfig = CostConfig(),
    metric: str = "d_t",
    *,
    strict: bool = False,
) -> GeneralAlignment:
    """Best candidate over ``config.k`` untimed alignments, each aligned in time.

    ``d_t`` aligns each linear candidate on its chain of static intervals
    (non-linear candidates are skipped); ``d_theta`` needs an extended free
    choice net. With ``strict=True`` candidates whose aligned timing is not a
    valid timing of the net (for instance because a competing transition's
    deadline forbids it) are skipped as well.
    """
    metric = {"stamp": "d_t", "delay": "d_theta"}.get(metric, metric)
    if metric not in {"d_t", "d_theta"}:
        raise ValueError(f"unknown metric {metric!r}")
    if metric == "d_theta" and not is_extended_free_choice(net):
        raise NotEFC("delay alignment needs an extended free choice net")
    candidates = untimed_align_kbest(net, word.actions, config.k, config.c_A, threshold=config.threshold)
    skipped: list[str] = []
    scored = []
    for cand in candidates:
        run, sigma = transfer_timestamps(word, cand.script)
        cp = unroll(net, run)
        sig = timing_from_sequence(cp, sigma)
        name = " ".join(run)
        try:
            if metric == "d_t":
                if not is_linear(cp):
                    skipped.append(f"{name}: causal process is not linear")
                    continue
                res, gamma = align_process(net, cp, sig)
                dist = res.cost
            else:
                dres = align_delay(net, cp, sig)
                gamma, dist = dres.gamma, dres.cost
        except (NoValidTiming, StampAlignmentError) as exc:
            skipped.append(f"{name}: {exc}")
            continue
        if strict and not is_valid_timing(net, cp, gamma):
            skipped.append(f"{name}: aligned timing is not valid for the net")
            continue
        total = cand.action_cost + config.c_T * dist
        scored.append((total, cand.action_cost, cand.run, cand, cp, gamma, dist))
    if not scored:
        raise NoAdmissibleCandidate("no candidate admits the chosen metric: " + "; ".join(skipped))
    total, _, _, cand, cp, gamma, dist = min(scored, key=lambda s: s[:3])
    order = sorted(cp.events, key=lambda e: (gamma[e], cp.index[e]))
    aligned = TimedTrace(
        tuple((net.label(cp.hom[e]), gamma[e]) for e in order),
        tuple(cp.hom[e] for e in order),
    )
    valid = bool(replay_timed(net, zip(aligned.transitions, aligned.timestamps)))  # type: ignore[arg-type]
    return GeneralAlignment(
        aligned, cand.script, cand.action_cost, config.c_T * dist, dist, total, metric, valid,
        len(candidates), tuple(skipped),
    )
