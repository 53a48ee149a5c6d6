"""Wall-clock estimation of a blind pattern run on a three-node
nitrogen-vacancy register.

The server holds one communication qubit and a few storage qubits.
Every node of the pattern reaches the server through one heralded
remote-state-preparation round (t1) followed by a swap into nuclear
storage (t2); each graph edge costs one mediated entangling step (t3);
a measurement costs the readout time (t4) plus one two-qubit swap-back
operation.  The schedule is serial: before measuring node j the server
first delivers every undelivered neighbor of j, then j itself if
needed, then applies the still-missing incident edges.

The estimate is deliberately coarse; classical communication latency is
excluded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["TimingModel", "ScheduleTrace", "estimate", "idle_report"]


@dataclass(frozen=True)
class TimingModel:
    """Step durations in milliseconds."""

    t1: float = 25.0          # heralded RSP round
    t2: float = 0.0015        # swap to nuclear storage
    t3: float = 3.5           # mediated entangling step per edge
    t4: float = 0.5           # optical readout
    two_bit_op: float = 0.5   # local two-qubit operation

    def __post_init__(self):
        for name in ("t1", "t2", "t3", "t4", "two_bit_op"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass
class ScheduleTrace:
    creation: dict = field(default_factory=dict)     # node -> time qubit lands
    measurement: dict = field(default_factory=dict)  # node -> time measured
    idle: dict = field(default_factory=dict)         # node -> wait interval
    rsp_during_idle: dict = field(default_factory=dict)
    total: float = 0.0
    rsp_count: int = 0


def estimate(pattern, timing: TimingModel = None, order=None) -> ScheduleTrace:
    """Serial timeline of the optimized run; all times in milliseconds.

    ``order`` defaults to the pattern's total order; it must measure
    every node exactly once.
    """
    timing = timing or TimingModel()
    order = tuple(order or pattern.total_order)
    if sorted(order) != sorted(pattern.graph.nodes):
        raise ValueError("order must cover every node exactly once")
    trace = ScheduleTrace()
    clock = 0.0
    delivered = set()
    applied = set()
    rsp_times = []

    def deliver(k):
        nonlocal clock
        clock += timing.t1 + timing.t2
        trace.creation[k] = clock
        rsp_times.append(clock)
        delivered.add(k)

    for j in order:
        for k in pattern.graph.neighbors(j):
            if k not in delivered:
                deliver(k)
        if j not in delivered:
            deliver(j)
        for k in pattern.graph.neighbors(j):
            e = frozenset((j, k))
            if e not in applied:
                clock += timing.t3
                applied.add(e)
        clock += timing.t4 + timing.two_bit_op
        trace.measurement[j] = clock
        trace.idle[j] = clock - trace.creation[j]
        trace.rsp_during_idle[j] = sum(
            1 for t in rsp_times if trace.creation[j] < t < clock)
    trace.total = clock
    trace.rsp_count = len(rsp_times)
    return trace


def idle_report(trace: ScheduleTrace) -> dict:
    """Mean idle time, the worst-waiting node, and the RSP rounds that
    node sits through."""
    if not trace.idle:
        return {"mean_idle": 0.0, "worst_node": None, "worst_idle": 0.0,
                "rsp_in_worst_window": 0}
    top = max(trace.idle.values())
    # accumulation noise can split exact ties; report the earliest node
    worst = min(j for j, t in trace.idle.items() if t > top - 1e-6)
    return {
        "mean_idle": sum(trace.idle.values()) / len(trace.idle),
        "worst_node": worst,
        "worst_idle": trace.idle[worst],
        "rsp_in_worst_window": trace.rsp_during_idle[worst],
    }
