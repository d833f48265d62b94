"""Sequential Monte Carlo simulation of branch, comm switch and controller failures.

Each replication draws a chronology for every failable component, walks
the merged event stream and resolves each branch fault against the
configuration left by faults still under repair.

Random streams are keyed by (seed, replication, component) and the
operator-response draws have their own stream, so scenarios that differ
only in response-time parameters see exactly the same faults.
"""
from __future__ import annotations

import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .contingency import CyberTimeline, InterruptionRecord, resolve_fault
from .indices import merge_intervals, tally_by_branch
from .sampling import (
    HOURS_PER_YEAR,
    RTO_STREAM_KIND,
    ComponentReliability,
    RandomStream,
    RtoParameters,
)
from .timeline import ComponentKind, StateTransitionVector, Transition, generate_transition_vector, merge_streams
from .topology import CyberNetwork, ElectricalNetwork

DEFAULT_SEED = 20150201

FULLY_RELIABLE = ComponentReliability(0.0, 3.0, 0.6)


@dataclass(frozen=True)
class Scenario:
    net: ElectricalNetwork
    cyber: CyberNetwork
    branch: ComponentReliability
    comm_switch: ComponentReliability = FULLY_RELIABLE
    controller: ComponentReliability = FULLY_RELIABLE
    rto: RtoParameters = field(default_factory=RtoParameters)
    horizon_years: float = 1000.0
    replications: int = 1000
    seed: int = DEFAULT_SEED
    name: str = ""

    def __post_init__(self):
        if not self.horizon_years > 0:
            raise ValueError(f"horizon_years must be > 0, got {self.horizon_years}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")

    @property
    def horizon_hours(self) -> float:
        return self.horizon_years * HOURS_PER_YEAR

    def branch_params(self, branch) -> ComponentReliability:
        if branch.failure_rate is None:
            return self.branch
        return ComponentReliability(branch.failure_rate, self.branch.repair_mean, self.branch.repair_std)


@dataclass(frozen=True)
class ReplicationResult:
    replication: int
    records: tuple[InterruptionRecord, ...]
    failure_count: int
    down_hours: float
    horizon_hours: float

    @property
    def tallies(self) -> dict[int, tuple[int, float]]:
        return tally_by_branch(self.records)


def component_vectors(scenario: Scenario, replication: int) -> list[StateTransitionVector]:
    horizon = scenario.horizon_hours
    seed = scenario.seed
    vectors = []
    for i, b in enumerate(scenario.net.branches):
        stream = RandomStream.for_component(seed, replication, ComponentKind.BRANCH, i)
        vectors.append(
            generate_transition_vector(scenario.branch_params(b), horizon, stream, (ComponentKind.BRANCH, b.id))
        )
    for i, sw in enumerate(scenario.cyber.comm_switches):
        stream = RandomStream.for_component(seed, replication, ComponentKind.COMM_SWITCH, i)
        vectors.append(
            generate_transition_vector(scenario.comm_switch, horizon, stream, (ComponentKind.COMM_SWITCH, sw))
        )
    for i, ctl in enumerate(scenario.cyber.controllers):
        stream = RandomStream.for_component(seed, replication, ComponentKind.CONTROLLER, i)
        vectors.append(
            generate_transition_vector(scenario.controller, horizon, stream, (ComponentKind.CONTROLLER, ctl.id))
        )
    return vectors


def run_replication(scenario: Scenario, replication: int) -> ReplicationResult:
    horizon = scenario.horizon_hours
    vectors = component_vectors(scenario, replication)
    cyber_state = CyberTimeline(
        scenario.cyber, {v.component[1]: v for v in vectors if v.component[0] != ComponentKind.BRANCH}
    )
    repair_end = {}
    for v in vectors:
        if v.component[0] == ComponentKind.BRANCH:
            for start, end in v.down_intervals():
                repair_end[v.component[1], start] = end

    rto_stream = RandomStream.for_component(scenario.seed, replication, RTO_STREAM_KIND, 0)
    failed: set[int] = set()
    records: list[InterruptionRecord] = []
    fault_windows = []
    fault_id = 0
    for ev in merge_streams(vectors):
        if ev.kind != ComponentKind.BRANCH:
            continue
        if ev.transition is Transition.REPAIR:
            failed.discard(ev.component)
            continue
        end = repair_end[ev.component, ev.time]
        res = resolve_fault(
            ev.component,
            ev.time,
            end - ev.time,
            cyber_state,
            scenario.rto,
            scenario.net,
            rto_stream,
            failed=frozenset(failed),
            fault_id=fault_id,
            horizon=horizon,
        )
        failed.add(ev.component)
        if res.records:
            records.extend(res.records)
            fault_windows.append((ev.time, end))
        fault_id += 1

    down = merge_intervals((r.start, r.end) for r in records)
    return ReplicationResult(
        replication=replication,
        records=tuple(records),
        # Occurrences cluster on the physical fault windows, which do not
        # depend on detection or decision delays.
        failure_count=len(merge_intervals(fault_windows)),
        down_hours=sum(b - a for a, b in down),
        horizon_hours=horizon,
    )


def run_simulation(scenario: Scenario, jobs: int = 1) -> list[ReplicationResult]:
    """All replications, ordered by index; identical for any ``jobs``."""
    indices = range(scenario.replications)
    if jobs <= 1 or scenario.replications == 1:
        return [run_replication(scenario, i) for i in indices]
    work = functools.partial(run_replication, scenario)
    chunk = max(1, scenario.replications // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(work, indices, chunksize=chunk))
