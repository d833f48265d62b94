"""Per-component up/down chronologies and their merged event stream."""
from __future__ import annotations

import csv
import enum
import heapq
from bisect import bisect_right
from dataclasses import dataclass, field

from .sampling import ComponentReliability, RandomStream, sample_repair_time, sample_time_to_failure


class State(enum.Enum):
    UP = "up"
    DOWN = "down"


class Transition(enum.Enum):
    FAIL = "fail"
    REPAIR = "repair"


class ComponentKind(enum.IntEnum):
    """Also the priority order for simultaneous events."""

    BRANCH = 0
    COMM_SWITCH = 1
    CONTROLLER = 2


@dataclass(frozen=True)
class StateTransitionVector:
    """Alternating Fail/Repair times (hours) of one component over [0, horizon].

    The component starts Up at time 0, so ``times[0::2]`` are failures and
    ``times[1::2]`` repairs. A vector ending in a failure is down until the
    horizon.
    """

    component: tuple  # (ComponentKind, id)
    times: tuple[float, ...]
    horizon: float

    def __post_init__(self):
        prev = 0.0
        for i, t in enumerate(self.times):
            if not (0.0 <= t <= self.horizon) or (i > 0 and t <= prev):
                raise ValueError(f"event times must be strictly increasing within [0, {self.horizon}]")
            prev = t

    @property
    def events(self) -> list[tuple[float, State]]:
        return [(t, State.DOWN if i % 2 == 0 else State.UP) for i, t in enumerate(self.times)]

    @property
    def failure_count(self) -> int:
        return (len(self.times) + 1) // 2

    def down_intervals(self) -> list[tuple[float, float]]:
        ts = self.times
        return [(ts[i], ts[i + 1] if i + 1 < len(ts) else self.horizon) for i in range(0, len(ts), 2)]

    def down_time(self) -> float:
        return sum(b - a for a, b in self.down_intervals())

    def state_at(self, t: float) -> State:
        """State after every event at or before ``t``."""
        if not 0.0 <= t <= self.horizon:
            raise ValueError(f"t={t} outside [0, {self.horizon}]")
        return State.DOWN if bisect_right(self.times, t) % 2 else State.UP

    def next_up_time(self, t: float) -> float:
        """Earliest time >= t at which the component is Up (horizon if never)."""
        i = bisect_right(self.times, t)
        if i % 2 == 0:
            return t
        return self.times[i] if i < len(self.times) else self.horizon

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time_h", "state"])
            writer.writerow([repr(0.0), State.UP.value])
            for t, s in self.events:
                writer.writerow([repr(t), s.value])


def generate_transition_vector(
    params: ComponentReliability,
    horizon_hours: float,
    stream: RandomStream,
    component: tuple = (ComponentKind.BRANCH, 0),
) -> StateTransitionVector:
    """Alternate exponential lifetimes and normal repairs until the horizon.

    A repair still running at the horizon is cut there; the failure counts.
    """
    if not horizon_hours > 0:
        raise ValueError(f"horizon must be > 0, got {horizon_hours}")
    times: list[float] = []
    if params.failure_rate > 0:
        t = 0.0
        while True:
            t += sample_time_to_failure(params.failure_rate, stream)
            if t >= horizon_hours:
                break
            times.append(t)
            t += sample_repair_time(params, stream)
            if t >= horizon_hours:
                break
            times.append(t)
    return StateTransitionVector(component, tuple(times), horizon_hours)


@dataclass(frozen=True, order=True)
class Event:
    time: float
    kind: ComponentKind
    component: object
    transition: Transition = field(compare=False)


def merge_streams(vectors) -> list[Event]:
    """All transitions in time order; ties go branch, comm switch, controller, then id."""
    vectors = list(vectors)
    if not vectors:
        return []
    horizons = {v.horizon for v in vectors}
    if len(horizons) > 1:
        raise ValueError(f"vectors have mismatched horizons: {sorted(horizons)}")

    def events(v):
        kind, cid = v.component
        for i, t in enumerate(v.times):
            yield Event(t, kind, cid, Transition.FAIL if i % 2 == 0 else Transition.REPAIR)

    return list(heapq.merge(*(events(v) for v in vectors), key=lambda e: (e.time, e.kind, e.component)))
