"""Timed alignments: closest valid timings of time Petri net runs.

Stamp alignment (each timestamp edited on its own) runs as a convex
piecewise-linear dynamic program on linear processes; delay alignment
(shifting an event and its causal future) runs as a greedy sweep on extended
free choice nets. Brute-force oracles and a naive action+time pipeline are
included.
"""

from .causal import (
    CausalProcess,
    cut,
    delay_distance,
    earlier,
    flow,
    is_linear,
    is_valid_timing,
    manhattan,
    timing_from_sequence,
    toe,
    unflow,
    unroll,
)
from .delay import DelayAlignment, NotEFC, NoValidTiming, align_delay
from .general import CostConfig, GeneralAlignment, align_general, transfer_timestamps, untimed_align_kbest
from .io import parse_net, parse_trace, serialize_net, serialize_trace
from .net import (
    NetState,
    TimedTrace,
    TimePetriNet,
    Transition,
    enabled,
    fire,
    initial_state,
    is_extended_free_choice,
    replay_timed,
    simulate_random,
)
from .oracle import GridSpec, brute_align, mixed_distance
from .rational import INF
from .stamp import ConvexPLF, StampAlignment, align_process, align_stamp, export_lp

__version__ = "0.1.0"
