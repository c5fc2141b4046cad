"""Stamp-only (Manhattan) alignment of linear causal processes.

The cost of aligning the first ``i`` events, as a function of the last
aligned timestamp, is convex and piecewise linear. It is carried as a
:class:`ConvexPLF` and advanced one event at a time::

    g_{i+1}(d) = |d - sigma_{i+1}| + min_{d - d' in [a, b]} g_i(d')

starting from ``g_0`` = the single point ``0`` with value ``0``.
"""

from __future__ import annotations

import math
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Union

from .causal import CausalProcess, TimingFunction, is_linear
from .net import TimePetriNet
from .rational import INF, Bound, clamp, format_time, to_bound, to_time

Num = Union[int, Fraction]
Segment = tuple  # (left, slope, right); right may be INF


class StampAlignmentError(ValueError):
    pass


@dataclass(frozen=True)
class ConvexPLF:
    """Convex piecewise-linear function on ``[base_x, right_x]``.

    ``segments`` are ``(left, slope, right)`` triples, contiguous from
    ``base_x``, with strictly increasing integer slopes. No segments means
    the domain is the single point ``base_x``.
    """

    base_x: Num
    base_y: Num
    segments: tuple[Segment, ...] = ()

    @property
    def right_x(self) -> Bound:
        return self.segments[-1][2] if self.segments else self.base_x

    def check(self) -> None:
        """Raise ``ValueError`` if the representation invariants do not hold."""
        x = self.base_x
        prev = None
        for i, (left, slope, right) in enumerate(self.segments):
            if left != x:
                raise ValueError(f"segment {i} starts at {left}, expected {x}")
            if not left < right:
                raise ValueError(f"segment {i} is empty")
            if right == INF and i != len(self.segments) - 1:
                raise ValueError("only the last segment may be unbounded")
            if prev is not None and slope <= prev:
                raise ValueError("slopes must be strictly increasing")
            if right == INF and slope < 0:
                raise ValueError("unbounded decreasing tail")
            prev, x = slope, right

    def __call__(self, x: Num) -> Num:
        if x < self.base_x or x > self.right_x:
            raise ValueError(f"{x} outside the domain [{self.base_x}, {self.right_x}]")
        y = self.base_y
        for left, slope, right in self.segments:
            if x <= right:
                return y + slope * (x - left)
            y += slope * (right - left)
        return y

    def breakpoints(self) -> list[Num]:
        pts = [self.base_x] + [r for _, _, r in self.segments]
        return [p for p in pts if p != INF]

    def scaled(self, factor: int) -> ConvexPLF:
        """Same function with the x and y axes divided by ``factor``."""
        if factor == 1:
            return self

        def q(v):
            return v if v == INF else Fraction(v, factor) if isinstance(v, int) else v / factor

        return ConvexPLF(
            q(self.base_x),
            q(self.base_y),
            tuple((q(l), s, q(r)) for l, s, r in self.segments),
        )


def _merge(segments: list[Segment]) -> tuple[Segment, ...]:
    out: list[Segment] = []
    for seg in segments:
        if out and out[-1][1] == seg[1]:
            out[-1] = (out[-1][0], seg[1], seg[2])
        else:
            out.append(seg)
    return tuple(out)


def plf_add_abs(g: ConvexPLF, anchor: Num) -> ConvexPLF:
    """``g(x) + |x - anchor|`` on the domain of ``g``."""
    segs: list[Segment] = []
    for left, slope, right in g.segments:
        if left < anchor < right:
            segs.append((left, slope - 1, anchor))
            segs.append((anchor, slope + 1, right))
        elif right <= anchor:
            segs.append((left, slope - 1, right))
        else:
            segs.append((left, slope + 1, right))
    return ConvexPLF(g.base_x, g.base_y + abs(g.base_x - anchor), _merge(segs))


def plf_minimum(g: ConvexPLF) -> tuple[Num, Bound, Num]:
    """``(m, m_prime, value)``: leftmost and rightmost minimisers and the minimum."""
    x, y = g.base_x, g.base_y
    segs = g.segments
    i = 0
    while i < len(segs) and segs[i][1] < 0:
        left, slope, right = segs[i]
        y += slope * (right - left)
        x = right
        i += 1
    m_prime = segs[i][2] if i < len(segs) and segs[i][1] == 0 else x
    return x, m_prime, y


def plf_min_window(g: ConvexPLF, a: Num, b: Bound) -> ConvexPLF:
    """``d -> min { g(d') : d - d' in [a, b] }``.

    The decreasing part shifts by ``a``, the increasing part by ``b``, and a
    flat piece at the minimum value bridges them.
    """
    if a > b:
        raise ValueError("empty window")
    m, m_prime, _ = plf_minimum(g)
    segs: list[Segment] = [(l + a, s, r + a) for l, s, r in g.segments if s < 0]
    lo, hi = m + a, m_prime + b
    if lo < hi:
        segs.append((lo, 0, hi))
    if b != INF:
        segs += [(l + b, s, r + b) for l, s, r in g.segments if s > 0]
    return ConvexPLF(g.base_x + a, g.base_y, _merge(segs))


def _argmin_on(g: ConvexPLF, lo: Bound, hi: Bound) -> tuple[Num, Num]:
    """Interval of minimisers of ``g`` restricted to ``[lo, hi]`` (clipped to the domain)."""
    lo = max(lo, g.base_x)
    hi = min(hi, g.right_x)
    if lo > hi:
        raise StampAlignmentError("backtracking window misses the domain")
    m, m_prime, _ = plf_minimum(g)
    if hi < m:
        return hi, hi
    if lo > m_prime:
        return lo, lo
    return max(lo, m), min(hi, m_prime)


def _common_scale(values: Sequence[Bound]) -> int:
    scale = 1
    for v in values:
        if v != INF:
            scale = math.lcm(scale, Fraction(v).denominator)
    return scale


def _to_int(v: Bound, scale: int):
    if v == INF:
        return INF
    f = Fraction(v) * scale
    assert f.denominator == 1
    return f.numerator


@dataclass(frozen=True)
class StampAlignment:
    """Result of :func:`align_stamp`. ``graphs[i]`` is the cost function after ``i+1`` events."""

    cost: Fraction
    gamma: tuple[Fraction, ...]
    scale: int = 1
    _raw_graphs: tuple[ConvexPLF, ...] = field(default=(), repr=False)

    @cached_property
    def graphs(self) -> tuple[ConvexPLF, ...]:
        return tuple(g.scaled(self.scale) for g in self._raw_graphs)


def _check_inputs(intervals, sigma):
    if not sigma:
        raise StampAlignmentError("empty trace")
    if len(intervals) != len(sigma):
        raise StampAlignmentError(f"{len(intervals)} intervals for {len(sigma)} timestamps")
    ivs = [(to_time(a), to_bound(b)) for a, b in intervals]
    for i, (a, b) in enumerate(ivs):
        if a > b:
            raise StampAlignmentError(f"interval {i} is empty: [{format_time(a)}, {format_time(b)}]")
        if a < 0:
            raise StampAlignmentError(f"interval {i} has a negative lower bound")
    return ivs, [to_time(s) for s in sigma]


def align_stamp(intervals: Sequence[tuple[object, object]], sigma: Sequence[object]) -> StampAlignment:
    """Optimal timestamps for a chain whose ``i``-th delay must lie in ``intervals[i]``.

    The first delay is measured from time 0. Returns the minimal Manhattan
    distance to ``sigma`` and one timestamp vector attaining it.
    """
    ivs, sig = _check_inputs(intervals, sigma)
    # all breakpoints are integer combinations of the inputs: run on integers
    scale = _common_scale([v for iv in ivs for v in iv] + sig)
    ivs_i = [(_to_int(a, scale), _to_int(b, scale)) for a, b in ivs]
    sig_i = [_to_int(s, scale) for s in sig]
    g = ConvexPLF(0, 0, ())
    graphs = []
    for (a, b), s in zip(ivs_i, sig_i):
        g = plf_add_abs(plf_min_window(g, a, b), s)
        graphs.append(g)
    cost = plf_minimum(g)[2]
    gamma = _backtrack(sig_i, graphs, cost, ivs_i)
    return StampAlignment(
        Fraction(cost, scale),
        tuple(Fraction(x, scale) for x in gamma),
        scale,
        tuple(graphs),
    )


def _backtrack(sigma, graphs, cost, intervals):
    n = len(graphs)
    gamma = [None] * n
    remaining = cost
    for i in range(n - 1, -1, -1):
        g = graphs[i]
        if i == n - 1:
            lo, hi = g.base_x, g.right_x
        else:
            a, b = intervals[i + 1]
            lo, hi = gamma[i + 1] - b, gamma[i + 1] - a
        lo, hi = _argmin_on(g, lo, hi)
        x = clamp(sigma[i], lo, hi)
        if g(x) != remaining:
            raise StampAlignmentError(f"no preimage of {remaining} in graph {i + 1}")
        gamma[i] = x
        remaining -= abs(x - sigma[i])
    if remaining != 0:
        raise StampAlignmentError("backtracking did not consume the whole cost")
    return gamma


def backtrack(
    sigma: Sequence[object],
    graphs: Sequence[ConvexPLF],
    cost: object,
    intervals: Sequence[tuple[object, object]],
) -> tuple[Fraction, ...]:
    """Recover an optimal timestamp vector from the per-prefix cost graphs.

    Walking backwards, each timestamp is taken from the minimisers of the
    previous graph inside the window allowed by the next interval, choosing
    the point closest to the observed stamp.
    """
    ivs, sig = _check_inputs(intervals, sigma)
    if len(graphs) != len(sig):
        raise StampAlignmentError("one graph per event expected")
    return tuple(to_time(x) for x in _backtrack(sig, list(graphs), to_time(cost), ivs))


def stamp_intervals(net: TimePetriNet, cp: CausalProcess) -> list[tuple[Fraction, Bound]]:
    """Static interval of each event of a linear process, in chain order."""
    if not is_linear(cp):
        raise StampAlignmentError("causal process is not linear")
    return [(net.eft(cp.hom[e]), net.lft(cp.hom[e])) for e in cp.events]


def align_process(
    net: TimePetriNet, cp: CausalProcess, sigma: Mapping[str, object]
) -> tuple[StampAlignment, TimingFunction]:
    """:func:`align_stamp` on a linear causal process; also returns gamma keyed by event."""
    res = align_stamp(stamp_intervals(net, cp), [sigma[e] for e in cp.events])
    return res, dict(zip(cp.events, res.gamma))


# -- graph dump -------------------------------------------------------------

def dump_graphs(graphs: Sequence[ConvexPLF]) -> str:
    """One line per graph: ``i; base_x; base_y; (left,slope,right); ...``."""
    lines = []
    for i, g in enumerate(graphs, start=1):
        parts = [str(i), format_time(Fraction(g.base_x)), format_time(Fraction(g.base_y))]
        parts += [
            f"({format_time(Fraction(l))},{s},{format_time(r if r == INF else Fraction(r))})"
            for l, s, r in g.segments
        ]
        lines.append("; ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_graph_dump(text: str) -> list[ConvexPLF]:
    graphs = []
    for line in text.splitlines():
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split(";")]
        segs = []
        for p in parts[3:]:
            l, s, r = p.strip("()").split(",")
            segs.append((to_time(l), int(s), to_bound(r)))
        graphs.append(ConvexPLF(to_time(parts[1]), to_time(parts[2]), tuple(segs)))
    return graphs


# -- LP export --------------------------------------------------------------

def _term(coef: Fraction, var: str) -> str:
    sign = "-" if coef < 0 else "+"
    mag = abs(coef)
    return f"{sign}{var}" if mag == 1 else f"{sign}{format_time(mag)} {var}"


def export_lp(cp: CausalProcess, net: TimePetriNet, sigma: Mapping[str, object] | Sequence[object]) -> str:
    """LP (lp_solve-style text) whose optimum is the stamp alignment cost.

    Variables ``g_i`` (aligned stamps), ``a_i``/``b_i`` (positive and negative
    parts of ``g_i - sigma_i``), all nonnegative by default. The objective
    line comes first; rational constants are written ``p/q``.
    """
    intervals = stamp_intervals(net, cp)
    if isinstance(sigma, Mapping):
        sig = [to_time(sigma[e]) for e in cp.events]
    else:
        sig = [to_time(s) for s in sigma]
    n = len(intervals)
    if len(sig) != n:
        raise StampAlignmentError("sigma does not match the process")
    lines = ["min: " + " ".join(f"+a{i} +b{i}" for i in range(1, n + 1)) + ";"]
    for i, s in enumerate(sig, start=1):
        lines.append(f"d{i}: +a{i} -b{i} -g{i} = {format_time(-s)};")
    for i, (lo, hi) in enumerate(intervals, start=1):
        expr = f"+g{i}" if i == 1 else f"+g{i} -g{i - 1}"
        lines.append(f"lo{i}: {expr} >= {format_time(lo)};")
        if hi != INF:
            lines.append(f"hi{i}: {expr} <= {format_time(hi)};")
    return "\n".join(lines) + "\n"


_LP_LINE = re.compile(r"^\s*(?:(?P<name>[A-Za-z_]\w*)\s*:)?\s*(?P<body>.*?)\s*;\s*$")
_LP_TERM = re.compile(r"([+-])\s*(?:(\d+(?:/\d+)?(?:\.\d+)?)\s+)?([A-Za-z_]\w*)")


@dataclass
class LinearProgram:
    variables: list[str]
    objective: dict[str, Fraction]
    rows: list[tuple[str, dict[str, Fraction], str, Fraction]]  # (name, coefs, op, rhs)


def parse_lp(text: str) -> LinearProgram:
    """Parse the subset of the LP text format written by :func:`export_lp`."""
    variables: list[str] = []
    objective: dict[str, Fraction] = {}
    rows = []

    def terms(expr: str) -> dict[str, Fraction]:
        expr = expr.strip()
        if expr and expr[0] not in "+-":
            expr = "+" + expr
        out: dict[str, Fraction] = {}
        pos = 0
        for m in _LP_TERM.finditer(expr):
            if expr[pos:m.start()].strip():
                raise ValueError(f"cannot parse LP expression {expr!r}")
            coef = to_time(m.group(2)) if m.group(2) else Fraction(1)
            if m.group(1) == "-":
                coef = -coef
            var = m.group(3)
            if var not in variables:
                variables.append(var)
            out[var] = out.get(var, Fraction(0)) + coef
            pos = m.end()
        if expr[pos:].strip():
            raise ValueError(f"cannot parse LP expression {expr!r}")
        return out

    for raw in text.splitlines():
        if not raw.strip() or raw.strip().startswith("/*"):
            continue
        m = _LP_LINE.match(raw)
        if not m:
            raise ValueError(f"bad LP line {raw!r}")
        name, body = m.group("name"), m.group("body")
        if name == "min":
            objective = terms(body)
            continue
        op = next(o for o in (">=", "<=", "=") if o in body)
        lhs, rhs = body.split(op)
        rows.append((name or f"r{len(rows) + 1}", terms(lhs), op, to_time(rhs.strip())))
    return LinearProgram(variables, objective, rows)


def solve_lp(text: str) -> tuple[float, dict[str, float]]:
    """Solve an exported LP with SciPy's HiGHS backend (floating point)."""
    import numpy as np
    from scipy.optimize import linprog

    lp = parse_lp(text)
    idx = {v: i for i, v in enumerate(lp.variables)}
    n = len(idx)
    c = np.zeros(n)
    for v, k in lp.objective.items():
        c[idx[v]] = float(k)
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for _, coefs, op, rhs in lp.rows:
        row = np.zeros(n)
        for v, k in coefs.items():
            row[idx[v]] = float(k)
        if op == "=":
            a_eq.append(row)
            b_eq.append(float(rhs))
        elif op == "<=":
            a_ub.append(row)
            b_ub.append(float(rhs))
        else:
            a_ub.append(-row)
            b_ub.append(-float(rhs))
    res = linprog(
        c,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=[(0, None)] * n,
        method="highs",
    )
    if res.status != 0:
        raise ValueError(f"LP not solved: {res.message}")
    return float(res.fun), {v: float(res.x[i]) for v, i in idx.items()}
