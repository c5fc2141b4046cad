"""Command line entry point: ``timed-align <command> ...``.

Exit codes: 0 ok, 1 negative verdict (invalid run), 2 parse error,
3 unmet precondition (non-EFC net, non-linear process, trace not a run),
4 no valid timing, 5 oracle size guard.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from .causal import (
    ProcessError,
    delay_distance,
    is_linear,
    is_valid_timing,
    manhattan,
    timing_from_sequence,
    unroll,
)
from .delay import NotEFC, NoValidTiming, align_delay
from .general import CostConfig, NoAdmissibleCandidate, align_general
from .generators import loop_workflow_instance, random_chain_instance
from .io import ParseError, bundled, read_net, read_trace, serialize_trace
from .net import NetError, SimulationIncomplete, TimedTrace, TimePetriNet, replay_timed, resolve_labels, simulate_random
from .oracle import NoFeasibleTiming, SizeGuardExceeded, mixed_distance
from .rational import format_time, to_time
from .stamp import StampAlignmentError, align_process, align_stamp, dump_graphs, export_lp, solve_lp

EXIT_OK, EXIT_NEGATIVE, EXIT_PARSE, EXIT_PRECONDITION, EXIT_NO_TIMING, EXIT_GUARD = range(6)


class Precondition(ValueError):
    pass


def _jsonable(x: Any) -> Any:
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return format_time(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _text(report: dict[str, Any]) -> str:
    lines = []
    for k, v in report.items():
        v = _jsonable(v)
        if isinstance(v, list):
            v = " ".join(str(x) for x in v)
        elif isinstance(v, dict):
            v = " ".join(f"{a}={b}" for a, b in v.items())
        if isinstance(v, str) and "\n" in v:
            lines.append(f"{k}:\n{v.rstrip()}")
        else:
            lines.append(f"{k}: {v}")
    return "\n".join(lines)


def _load_net(arg: str) -> TimePetriNet:
    path = Path(arg)
    if not path.exists() and bundled(arg).exists():
        path = bundled(arg)
    elif not path.exists() and bundled(arg + ".net").exists():
        path = bundled(arg + ".net")
    try:
        return read_net(path)
    except OSError as exc:
        raise ParseError(f"cannot read net: {exc}") from None


def _load_trace(arg: str) -> TimedTrace:
    try:
        return read_trace(arg)
    except OSError as exc:
        raise ParseError(f"cannot read trace: {exc}") from None


def _run_of(net: TimePetriNet, trace: TimedTrace) -> list[str]:
    if trace.transitions is not None:
        return list(trace.transitions)
    try:
        return resolve_labels(net, trace.actions)
    except NetError as exc:
        raise Precondition(str(exc)) from None


def _process(net: TimePetriNet, trace: TimedTrace):
    run = _run_of(net, trace)
    try:
        cp = unroll(net, run)
    except ProcessError as exc:
        raise Precondition(str(exc)) from None
    return cp, timing_from_sequence(cp, trace.timestamps)


def _ordered(cp, tau) -> list[Fraction]:
    return [tau[e] for e in cp.events]


# ---- commands ---------------------------------------------------------------


def cmd_validate(args) -> tuple[int, dict]:
    net, trace = _load_net(args.net), _load_trace(args.trace)
    run = _run_of(net, trace)
    verdict = replay_timed(net, list(zip(run, trace.timestamps)))
    report = {"verdict": "valid" if verdict else "invalid"}
    if not verdict:
        report.update(event=verdict.where, condition=verdict.condition, reason=verdict.reason)
    return (EXIT_OK if verdict else EXIT_NEGATIVE), report


def cmd_align(args) -> tuple[int, dict]:
    net, trace = _load_net(args.net), _load_trace(args.trace)
    metric = "d_t" if args.metric == "stamp" else "d_theta"
    if args.general:
        config = CostConfig(to_time(args.ca), to_time(args.ct), args.k, args.threshold)
        res = align_general(net, trace, config, metric, strict=args.strict)
        return EXIT_OK, {
            "total": res.total,
            "action_cost": res.action_cost,
            "time_cost": res.time_cost,
            "edit_script": [str(m) for m in res.edit_script],
            "actions": list(res.aligned_word.actions),
            "gamma": list(res.aligned_word.timestamps),
            "replays": res.model_valid,
        }
    cp, sigma = _process(net, trace)
    if metric == "d_t":
        if not is_linear(cp):
            raise Precondition("stamp alignment needs a linear causal process")
        res, gamma = align_process(net, cp, sigma)
        cost = res.cost
    else:
        dres = align_delay(net, cp, sigma)
        cost, gamma = dres.cost, dres.gamma
    return EXIT_OK, {
        "cost": cost,
        "events": list(cp.events),
        "actions": list(cp.labels(net)),
        "sigma": _ordered(cp, sigma),
        "gamma": _ordered(cp, gamma),
        "valid": bool(is_valid_timing(net, cp, gamma)),
    }


def cmd_distance(args) -> tuple[int, dict]:
    t1, t2 = _load_trace(args.t1), _load_trace(args.t2)
    if t1.actions != t2.actions:
        raise Precondition("the two traces carry different actions")
    if args.net is None:
        if args.metric != "stamp":
            raise Precondition(f"--metric {args.metric} needs --net for causality")
        return EXIT_OK, {"metric": "stamp", "distance": sum(
            (abs(a - b) for a, b in zip(t1.timestamps, t2.timestamps)), Fraction(0))}
    net = _load_net(args.net)
    cp, tau1 = _process(net, t1)
    tau2 = timing_from_sequence(cp, t2.timestamps)
    if args.metric == "stamp":
        d = manhattan(tau1, tau2)
    elif args.metric == "delay":
        d = delay_distance(cp, tau1, tau2)
    else:
        from .oracle import GridSpec

        den = 1
        for v in list(tau1.values()) + list(tau2.values()):
            den = math.lcm(den, v.denominator)
        d = mixed_distance(cp, tau1, tau2, GridSpec(Fraction(1, den)))
    return EXIT_OK, {"metric": args.metric, "distance": d}


def cmd_generate(args) -> tuple[int, dict]:
    net = _load_net(args.net)
    try:
        run = simulate_random(net, args.seed, args.max_events, step=to_time(args.step))
    except SimulationIncomplete as exc:
        raise Precondition(f"{exc} (after {len(exc.partial)} events)") from None
    trace = TimedTrace(tuple((net.label(t), ts) for t, ts in run), tuple(t for t, _ in run))
    text = serialize_trace(trace)
    if args.out:
        Path(args.out).write_text(text)
    return EXIT_OK, {"events": len(trace), "trace": text if not args.out else args.out}


def cmd_export_lp(args) -> tuple[int, dict]:
    net, trace = _load_net(args.net), _load_trace(args.trace)
    cp, sigma = _process(net, trace)
    if not is_linear(cp):
        raise Precondition("LP export needs a linear causal process")
    lp = export_lp(cp, net, sigma)
    if args.out:
        Path(args.out).write_text(lp)
    report: dict[str, Any] = {"lp": args.out or lp}
    if args.solve:
        value, _ = solve_lp(lp)
        report["optimum"] = value
    return EXIT_OK, report


def cmd_dump_graphs(args) -> tuple[int, dict]:
    net, trace = _load_net(args.net), _load_trace(args.trace)
    cp, sigma = _process(net, trace)
    if not is_linear(cp):
        raise Precondition("graph dump needs a linear causal process")
    from .stamp import stamp_intervals

    res = align_stamp(stamp_intervals(net, cp), _ordered(cp, sigma))
    text = dump_graphs(res.graphs)
    if args.out:
        Path(args.out).write_text(text)
    return EXIT_OK, {"cost": res.cost, "graphs": args.out or text}


def _bench_one(metric: str, n: int, seed: int, repeats: int) -> tuple[int, float]:
    rng = random.Random(f"{seed}:{n}")
    best = math.inf
    if metric == "stamp":
        intervals, sigma = random_chain_instance(rng, n, max_sigma=None)
        for _ in range(repeats):
            t0 = time.perf_counter()
            align_stamp(intervals, sigma)
            best = min(best, time.perf_counter() - t0)
        return n, best
    net, cp, sigma = loop_workflow_instance(rng, max(1, (n - 1) // 5))
    for _ in range(repeats):
        t0 = time.perf_counter()
        align_delay(net, cp, sigma)
        best = min(best, time.perf_counter() - t0)
    return len(cp.events), best


def cmd_bench(args) -> tuple[int, dict]:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        futures = {n: pool.submit(_bench_one, args.metric, n, args.seed, args.repeats) for n in sizes}
        rows = [futures[n].result() for n in sizes]
    report: dict[str, Any] = {"metric": args.metric, "rows": [f"{n},{s:.6f}" for n, s in rows]}
    if len(rows) >= 2 and rows[0][1] > 0 and rows[-1][1] > 0:
        (n0, s0), (n1, s1) = rows[0], rows[-1]
        report["slope"] = round(math.log(s1 / s0) / math.log(n1 / n0), 3)
    return EXIT_OK, report


# ---- wiring -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="timed-align", description="Timed alignments on time Petri nets.")
    parser.add_argument("--format", choices=["text", "json"], default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    def net_trace(p):
        p.add_argument("--net", required=True, help="net file, or the name of a bundled net")
        p.add_argument("--trace", required=True, help="CSV rows action,timestamp[,transition]")

    p = sub.add_parser("validate", help="replay a timed trace on the net")
    net_trace(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("align", help="closest valid timing (or word, with --general)")
    net_trace(p)
    p.add_argument("--metric", choices=["stamp", "delay"], default="stamp")
    p.add_argument("--general", action="store_true", help="also edit actions (k-best candidates)")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--ca", default="1", help="cost of one action insertion/deletion")
    p.add_argument("--ct", default="1", help="weight of the time distance")
    p.add_argument("--threshold", action="store_true", help="keep all candidates within best + ca")
    p.add_argument("--strict", action="store_true", help="skip candidates whose timing breaks urgency")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("distance", help="distance between two timings of the same run")
    p.add_argument("--metric", choices=["stamp", "delay", "mixed"], default="stamp")
    p.add_argument("--t1", required=True)
    p.add_argument("--t2", required=True)
    p.add_argument("--net")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("generate", help="random valid timed run of the net")
    p.add_argument("--net", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-events", type=int, default=20)
    p.add_argument("--step", default="1/2", help="delay grid step")
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("export-lp", help="write the stamp alignment as a linear program")
    net_trace(p)
    p.add_argument("--out")
    p.add_argument("--solve", action="store_true", help="also solve it with scipy")
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("bench", help="time the aligners on growing random instances")
    p.add_argument("--metric", choices=["stamp", "delay"], default="stamp")
    p.add_argument("--sizes", default="10,100,1000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("dump-graphs", help="write the cost-to-align functions for plotting")
    net_trace(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dump_graphs)
    return parser


def run_command(argv: Optional[list[str]] = None) -> tuple[int, str]:
    """Run one command; returns (exit code, rendered report)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, report = args.func(args)
    except (ParseError, ValueError) as exc:
        code, report = _classify(exc), {"error": type(exc).__name__, "message": str(exc)}
    if args.format == "json":
        return code, json.dumps(_jsonable(report), indent=2)
    return code, _text(report)


def _classify(exc: Exception) -> int:
    if isinstance(exc, SizeGuardExceeded):
        return EXIT_GUARD
    if isinstance(exc, (NoValidTiming, NoFeasibleTiming, NoAdmissibleCandidate, StampAlignmentError)):
        return EXIT_NO_TIMING
    if isinstance(exc, (Precondition, NotEFC, ProcessError)):
        return EXIT_PRECONDITION
    return EXIT_PARSE


def main(argv: Optional[list[str]] = None) -> int:
    code, text = run_command(argv)
    print(text, file=sys.stdout if code in (EXIT_OK, EXIT_NEGATIVE) else sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
