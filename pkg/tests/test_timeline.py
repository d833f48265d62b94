import csv

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from cppds_smcs.sampling import HOURS_PER_YEAR, ComponentReliability, RandomStream
from cppds_smcs.timeline import (
    ComponentKind,
    State,
    StateTransitionVector,
    Transition,
    generate_transition_vector,
    merge_streams,
)

BRANCH = ComponentReliability(0.1, 3.0, 0.6)
T_1000 = 1000 * HOURS_PER_YEAR


def test_fully_reliable_component_never_fails():
    v = generate_transition_vector(ComponentReliability(0.0, 3.0, 0.6), T_1000, RandomStream(1))
    assert v.times == ()
    assert v.state_at(T_1000) is State.UP
    assert v.down_time() == 0.0


def test_failure_count_matches_renewal_mean():
    counts = np.array(
        [generate_transition_vector(BRANCH, T_1000, RandomStream.for_component(1, r, 0, 0)).failure_count
         for r in range(300)]
    )
    expected = 1000 * 0.1 / (1 + 0.1 * 3.0 / HOURS_PER_YEAR)
    assert expected == pytest.approx(99.9966, abs=1e-3)
    # Poisson-like dispersion: sd ~ 10 per vector
    assert abs(counts.mean() - expected) < 3 * 10 / np.sqrt(len(counts))


def test_first_failure_is_exponential():
    first = [
        generate_transition_vector(BRANCH, T_1000, RandomStream.for_component(2, r, 0, 0)).times[0]
        for r in range(3000)
    ]
    d = stats.kstest(first, stats.expon(scale=HOURS_PER_YEAR / 0.1).cdf)
    assert d.pvalue > 1e-3


def test_vector_structure_and_truncation():
    v = generate_transition_vector(ComponentReliability(5.0, 3.0, 0.6), 10 * HOURS_PER_YEAR, RandomStream(3))
    assert all(b > a for a, b in zip(v.times, v.times[1:]))
    up = v.horizon - v.down_time()
    assert up + v.down_time() == pytest.approx(v.horizon)
    for a, b in v.down_intervals():
        assert 0 < b - a <= 3.0 + 6 * 0.6 or b == v.horizon


def test_same_seed_same_vector():
    a = generate_transition_vector(BRANCH, T_1000, RandomStream.for_component(9, 4, 0, 2))
    b = generate_transition_vector(BRANCH, T_1000, RandomStream.for_component(9, 4, 0, 2))
    assert a == b


def test_repair_running_at_horizon_is_cut():
    v = StateTransitionVector((ComponentKind.BRANCH, 1), (5.0, 7.0, 9.0), 10.0)
    assert v.failure_count == 2
    assert v.down_intervals() == [(5.0, 7.0), (9.0, 10.0)]
    assert v.state_at(10.0) is State.DOWN
    assert v.next_up_time(9.5) == 10.0


def test_state_at_conventions():
    v = StateTransitionVector((ComponentKind.CONTROLLER, "c"), (2.0, 3.2), 10.0)
    assert v.state_at(0.0) is State.UP
    assert v.state_at(2.0) is State.DOWN
    assert v.state_at(2.0 + 1e-9) is State.DOWN
    assert v.state_at(3.2) is State.UP
    assert v.next_up_time(2.0) == 3.2
    assert v.next_up_time(5.0) == 5.0
    with pytest.raises(ValueError):
        v.state_at(10.5)


def test_invalid_vectors_rejected():
    with pytest.raises(ValueError):
        StateTransitionVector((ComponentKind.BRANCH, 1), (3.0, 2.0), 10.0)
    with pytest.raises(ValueError):
        StateTransitionVector((ComponentKind.BRANCH, 1), (3.0, 12.0), 10.0)


@given(
    times=st.lists(st.floats(0.0, 100.0, allow_nan=False), max_size=12, unique=True),
    t=st.floats(0.0, 100.0),
)
def test_state_at_agrees_with_linear_scan(times, t):
    times = tuple(sorted(times))
    v = StateTransitionVector((ComponentKind.BRANCH, 1), times, 100.0)
    state = State.UP
    for i, et in enumerate(times):
        if et <= t:
            state = State.DOWN if i % 2 == 0 else State.UP
    assert v.state_at(t) is state


def test_merge_empty_and_single():
    assert merge_streams([]) == []
    v = StateTransitionVector((ComponentKind.BRANCH, 4), (1.0, 2.0, 5.0), 10.0)
    events = merge_streams([v])
    assert [e.time for e in events] == [1.0, 2.0, 5.0]
    assert [e.transition for e in events] == [Transition.FAIL, Transition.REPAIR, Transition.FAIL]


def test_merge_tie_break_branch_first():
    ctl = StateTransitionVector((ComponentKind.CONTROLLER, "ctl3"), (4.0,), 10.0)
    sw = StateTransitionVector((ComponentKind.COMM_SWITCH, "cs9"), (4.0,), 10.0)
    br_b = StateTransitionVector((ComponentKind.BRANCH, 9), (4.0,), 10.0)
    br_a = StateTransitionVector((ComponentKind.BRANCH, 3), (4.0,), 10.0)
    events = merge_streams([ctl, sw, br_b, br_a])
    assert [(e.kind, e.component) for e in events] == [
        (ComponentKind.BRANCH, 3),
        (ComponentKind.BRANCH, 9),
        (ComponentKind.COMM_SWITCH, "cs9"),
        (ComponentKind.CONTROLLER, "ctl3"),
    ]


def test_merge_orders_by_time_and_alternates():
    vs = [
        generate_transition_vector(ComponentReliability(2.0, 3.0, 0.6), 50 * HOURS_PER_YEAR, RandomStream(i), (ComponentKind.BRANCH, i))
        for i in range(5)
    ]
    events = merge_streams(vs)
    assert [e.time for e in events] == sorted(e.time for e in events)
    assert len(events) == sum(len(v.times) for v in vs)
    for i in range(5):
        kinds = [e.transition for e in events if e.component == i]
        assert kinds[::2] == [Transition.FAIL] * len(kinds[::2])
        assert kinds[1::2] == [Transition.REPAIR] * len(kinds[1::2])


def test_merge_rejects_mismatched_horizons():
    with pytest.raises(ValueError):
        merge_streams([
            StateTransitionVector((ComponentKind.BRANCH, 1), (), 10.0),
            StateTransitionVector((ComponentKind.BRANCH, 2), (), 11.0),
        ])


def test_csv_dump(tmp_path):
    v = StateTransitionVector((ComponentKind.BRANCH, 1), (1.5, 4.5), 10.0)
    out = tmp_path / "v.csv"
    v.to_csv(out)
    rows = list(csv.reader(out.open()))
    assert rows == [["time_h", "state"], ["0.0", "up"], ["1.5", "down"], ["4.5", "up"]]
