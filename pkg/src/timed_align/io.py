"""Text formats for nets and traces.

Net documents are line oriented::

    timed-align-net 1
    name example1
    description optional free text
    places p0 p1 p2
    transition a a 0 inf        # id label eft lft
    arc p0 a
    initial p0=1
    final p2=1

``#`` starts a comment. Traces are CSV rows ``action,timestamp[,transition]``.
Times are exact: integers, decimals (``0.1``) or ``p/q``; ``inf`` is allowed
as an upper bound only.
"""

from __future__ import annotations

import csv
import io
import re
from pathlib import Path

from .net import NetError, TimedTrace, TimePetriNet, Transition
from .rational import format_time, to_bound, to_time

HEADER = "timed-align-net"
VERSION = 1
_TOKEN = re.compile(r"\S+")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        self.message = message
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


def _tokens(line: str) -> list[tuple[int, str]]:
    body = line.split("#", 1)[0]
    return [(m.start() + 1, m.group()) for m in _TOKEN.finditer(body)]


def _marking(tokens, lineno) -> dict[str, int]:
    out: dict[str, int] = {}
    for col, tok in tokens:
        place, sep, count = tok.partition("=")
        try:
            n = int(count) if sep else 1
        except ValueError:
            raise ParseError(f"bad token count {count!r}", lineno, col) from None
        out[place] = out.get(place, 0) + n
    return out


def parse_net(text: str) -> TimePetriNet:
    name = ""
    places: list[str] = []
    transitions: list[Transition] = []
    arcs: list[tuple[str, str]] = []
    initial: dict[str, int] = {}
    final: dict[str, int] = {}
    seen_header = False
    last_line = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        last_line = lineno
        toks = _tokens(line)
        if not toks:
            continue
        col, key = toks[0]
        args = toks[1:]
        if not seen_header:
            if key != HEADER or len(args) != 1:
                raise ParseError(f"expected header '{HEADER} {VERSION}'", lineno, col)
            if args[0][1] != str(VERSION):
                raise ParseError(f"unsupported version {args[0][1]}", lineno, args[0][0])
            seen_header = True
            continue
        try:
            if key == "name":
                name = " ".join(t for _, t in args)
            elif key == "description":
                pass  # kept for humans only
            elif key == "places":
                places.extend(t for _, t in args)
            elif key == "transition":
                if len(args) != 4:
                    raise ParseError("transition needs: id label eft lft", lineno, col)
                (_, tid), (_, label), (ec, eft), (lc, lft) = args
                try:
                    e = to_time(eft)
                except (ValueError, TypeError):
                    raise ParseError(f"bad eft {eft!r}", lineno, ec) from None
                try:
                    l = to_bound(lft)
                except (ValueError, TypeError):
                    raise ParseError(f"bad lft {lft!r}", lineno, lc) from None
                transitions.append(Transition(tid, label, e, l))
            elif key == "arc":
                if len(args) != 2:
                    raise ParseError("arc needs: source target", lineno, col)
                arcs.append((args[0][1], args[1][1]))
            elif key == "initial":
                initial = _marking(args, lineno)
            elif key == "final":
                final = _marking(args, lineno)
            else:
                raise ParseError(f"unknown keyword {key!r}", lineno, col)
        except NetError as exc:
            raise ParseError(str(exc), lineno, col) from None
    if not seen_header:
        raise ParseError("empty net document", 1, 1)
    try:
        return TimePetriNet(places, transitions, arcs, initial, final, name)
    except NetError as exc:
        raise ParseError(str(exc), last_line, 1) from None


def _marking_text(m) -> str:
    return " ".join(f"{p}={n}" for p, n in m.items())


def serialize_net(net: TimePetriNet, description: str = "") -> str:
    lines = [f"{HEADER} {VERSION}"]
    if net.name:
        lines.append(f"name {net.name}")
    if description:
        lines.append(f"description {description}")
    lines.append("places " + " ".join(net.places))
    for t in net.transitions:
        lines.append(f"transition {t.id} {t.label} {format_time(t.eft)} {format_time(t.lft)}")
    for src, dst in net.arcs:
        lines.append(f"arc {src} {dst}")
    lines.append(("initial " + _marking_text(net.initial_marking)).rstrip())
    lines.append(("final " + _marking_text(net.final_marking)).rstrip())
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> TimedTrace:
    events = []
    transitions: list[str] = []
    rows = [
        (i, row)
        for i, row in enumerate(csv.reader(io.StringIO(text)), 1)
        if row and "".join(row).strip() and not row[0].lstrip().startswith("#")
    ]
    for lineno, row in rows:
        row = [c.strip() for c in row]
        if len(row) not in (2, 3):
            raise ParseError("expected action,timestamp[,transition]", lineno, 1)
        if not row[0]:
            raise ParseError("empty action", lineno, 1)
        try:
            ts = to_time(row[1])
        except (ValueError, TypeError):
            raise ParseError(f"bad timestamp {row[1]!r}", lineno, len(row[0]) + 2) from None
        if ts < 0:
            raise ParseError("negative timestamp", lineno, len(row[0]) + 2)
        if events and ts < events[-1][1]:
            raise ParseError("timestamps must be nondecreasing", lineno, len(row[0]) + 2)
        events.append((row[0], ts))
        if len(row) == 3:
            transitions.append(row[2])
    if transitions and len(transitions) != len(events):
        raise ParseError("either every row names a transition or none does", rows[-1][0], 1)
    return TimedTrace(tuple(events), tuple(transitions) if transitions else None)


def serialize_trace(trace: TimedTrace) -> str:
    out = []
    for i, (a, ts) in enumerate(trace.events):
        row = f"{a},{format_time(ts)}"
        if trace.transitions is not None:
            row += f",{trace.transitions[i]}"
        out.append(row)
    return "".join(r + "\n" for r in out)


def read_net(path: str | Path) -> TimePetriNet:
    return parse_net(Path(path).read_text())


def read_trace(path: str | Path) -> TimedTrace:
    return parse_trace(Path(path).read_text())


def bundled(name: str) -> Path:
    """Path of a net shipped in the package's data directory."""
    return Path(__file__).with_name("data") / name
