"""Turning one branch fault into customer interruption records.

Outage length for every customer group hit by a fault is composed
additively: detection delay, then the operator's decision time, then (for
groups that cannot be re-fed through a tie) the repair itself. Switching is
automated and instantaneous.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .indices import merge_intervals
from .sampling import RandomStream, RtoParameters, rto_hours
from .timeline import State, StateTransitionVector
from .topology import (
    CommStatus,
    CyberNetwork,
    ElectricalNetwork,
    controller_comm_status,
    energized_branches,
    energized_buses,
)

RSTP_RECONFIGURATION_HOURS = 30.0 / 3600.0


@dataclass(frozen=True)
class InterruptionRecord:
    fault_id: int
    branches: frozenset[int]
    customers: int
    start: float  # hours
    duration: float  # hours
    kind: str  # "faulted", "restorable" or "unrestorable"

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass(frozen=True)
class FaultResolution:
    faulted: int
    energized_at_fault: bool
    isolation: tuple[str, ...]
    ties_closed: tuple[str, ...]
    ties_opened: tuple[str, ...]
    restorable: frozenset[int]
    unrestorable: frozenset[int]
    records: tuple[InterruptionRecord, ...] = ()

    @property
    def restored_count(self) -> int:
        return len(self.restorable)


class CyberTimeline:
    """Comm switch and controller chronologies of one replication.

    Cyber failures are looked up lazily at branch-fault instants; they never
    interrupt customers by themselves.
    """

    def __init__(self, cyber: CyberNetwork, vectors: Mapping[str, StateTransitionVector] | None = None):
        self.cyber = cyber
        self.vectors = dict(vectors or {})
        self._failing = [(name, v) for name, v in sorted(self.vectors.items()) if v.times]
        spans = merge_intervals(iv for _, v in self._failing for iv in v.down_intervals())
        self._span_starts = [a for a, _ in spans]
        self._span_ends = [b for _, b in spans]

    def any_down(self, t: float) -> bool:
        """Whether some cyber component is failed at ``t`` (closed-left intervals)."""
        i = bisect_right(self._span_starts, t) - 1
        return i >= 0 and t < self._span_ends[i]

    def failed_at(self, t: float) -> set[str]:
        return {name for name, v in self._failing if v.state_at(t) is State.DOWN}

    def status(self, branch_id: int, t: float) -> CommStatus:
        if not self.any_down(t):
            return CommStatus.CONNECTED
        failed = self.failed_at(t)
        return controller_comm_status(self.cyber, branch_id, failed, failed)

    def _recovery_candidates(self, t: float):
        out = set()
        for _, v in self._failing:
            for rt in v.times[1::2]:
                if rt > t:
                    out.add(rt)
        return sorted(out)

    def detection_delay(self, branch_id: int, t: float) -> float:
        """Hours until the operation centre learns of a fault on ``branch_id`` at ``t``."""
        status = self.status(branch_id, t)
        if status is CommStatus.CONNECTED:
            return 0.0
        if status is CommStatus.CONNECTED_AFTER_RSTP:
            return RSTP_RECONFIGURATION_HOURS
        for rt in self._recovery_candidates(t):
            later = self.status(branch_id, rt)
            if later is CommStatus.CONNECTED:
                return rt - t
            if later is CommStatus.CONNECTED_AFTER_RSTP:
                return rt - t + RSTP_RECONFIGURATION_HOURS
        horizon = min((v.horizon for v in self.vectors.values()), default=t)
        return max(horizon - t, 0.0)


def detection_delay(branch_id: int, t: float, cyber_state: CyberTimeline | None) -> float:
    if cyber_state is None:
        return 0.0
    return cyber_state.detection_delay(branch_id, t)


@lru_cache(maxsize=4096)
def restoration_ties(net: ElectricalNetwork, failed: frozenset[int]) -> tuple[str, ...]:
    """Ties to close so every reachable healthy island is re-fed, radially.

    Each pass closes the lowest-id tie joining a live bus to a dead island
    that still holds a healthy load; one tie per island keeps it radial.
    """
    failed_switches = [net.branch(b).switch for b in failed]
    cfg = net.base_configuration().with_open(*failed_switches)
    healthy_loads = {b.to_bus for b in net.branches if b.id not in failed}
    closed: list[str] = []
    ties = sorted(net.tie_switches, key=lambda t: t.id)
    while True:
        live = energized_buses(net, cfg, failed)
        for tie in ties:
            if tie.id in cfg.closed or (tie.bus_a in live) == (tie.bus_b in live):
                continue
            dead = tie.bus_b if tie.bus_a in live else tie.bus_a
            if _island(net, cfg, failed, dead) & healthy_loads:
                cfg = cfg.with_closed(tie.id)
                closed.append(tie.id)
                break
        else:
            return tuple(sorted(closed))


def _island(net, cfg, failed, start: int) -> set[int]:
    adj: dict[int, list[int]] = {}
    for b in net.branches:
        if b.id not in failed and b.switch in cfg.closed:
            adj.setdefault(b.from_bus, []).append(b.to_bus)
            adj.setdefault(b.to_bus, []).append(b.from_bus)
    for t in net.tie_switches:
        if t.id in cfg.closed:
            adj.setdefault(t.bus_a, []).append(t.bus_b)
            adj.setdefault(t.bus_b, []).append(t.bus_a)
    seen = {start}
    stack = [start]
    while stack:
        for nxt in adj.get(stack.pop(), ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def configuration_for(net: ElectricalNetwork, failed: frozenset[int]):
    """Operating configuration with ``failed`` isolated and restoration applied."""
    cfg = net.base_configuration().with_open(*(net.branch(b).switch for b in failed))
    return cfg.with_closed(*restoration_ties(net, failed))


@lru_cache(maxsize=4096)
def select_restoration(net: ElectricalNetwork, faulted: int, failed: frozenset[int] = frozenset()) -> FaultResolution:
    """Isolation and restoration plan for ``faulted`` given already-failed branches.

    ``restorable`` are branches cut off by the isolation that the new
    configuration re-feeds; ``unrestorable`` lose supply until repair.
    """
    branch = net.branch(faulted)
    failed = frozenset(failed) - {faulted}
    before = configuration_for(net, failed)
    served_before = energized_branches(net, before, failed)
    after_failed = failed | {faulted}
    isolated = before.with_open(branch.switch)
    served_isolated = energized_branches(net, isolated, after_failed)
    after = configuration_for(net, after_failed)
    served_after = energized_branches(net, after, after_failed)

    lost = served_before - served_isolated - {faulted}
    ties_before = set(restoration_ties(net, failed))
    ties_after = set(restoration_ties(net, after_failed))
    return FaultResolution(
        faulted=faulted,
        energized_at_fault=faulted in served_before,
        isolation=(branch.switch,),
        ties_closed=tuple(sorted(ties_after - ties_before)),
        ties_opened=tuple(sorted(ties_before - ties_after)),
        restorable=frozenset(lost & served_after),
        unrestorable=frozenset(served_before - served_after - {faulted}),
    )


def resolve_fault(
    faulted: int,
    fault_time: float,
    repair_duration: float,
    cyber_state: CyberTimeline | None,
    rto: RtoParameters,
    net: ElectricalNetwork,
    stream: RandomStream,
    failed: frozenset[int] = frozenset(),
    fault_id: int = 0,
    horizon: float | None = None,
) -> FaultResolution:
    """Plan plus interruption records for a fault at ``fault_time``.

    A fault on a branch that was already without supply yields no records
    and draws no operator response time.
    """
    plan = select_restoration(net, faulted, frozenset(failed))
    if not plan.energized_at_fault:
        return plan

    delay = detection_delay(faulted, fault_time, cyber_state)
    decision = rto_hours(rto, stream)
    groups = (
        ("faulted", frozenset({faulted}), delay + decision + repair_duration),
        ("restorable", plan.restorable, delay + decision),
        ("unrestorable", plan.unrestorable, delay + decision + repair_duration),
    )
    records = []
    for kind, branches, duration in groups:
        if horizon is not None:
            duration = min(duration, horizon - fault_time)
        customers = net.customers_of(branches)
        if duration > 0 and customers > 0:
            records.append(InterruptionRecord(fault_id, branches, customers, fault_time, duration, kind))
    return FaultResolution(
        faulted=plan.faulted,
        energized_at_fault=True,
        isolation=plan.isolation,
        ties_closed=plan.ties_closed,
        ties_opened=plan.ties_opened,
        restorable=plan.restorable,
        unrestorable=plan.unrestorable,
        records=tuple(records),
    )
