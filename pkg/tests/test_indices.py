import math

import pytest
from hypothesis import given, strategies as st

from cppds_smcs.contingency import InterruptionRecord
from cppds_smcs.engine import ReplicationResult, Scenario, run_simulation
from cppds_smcs.indices import (
    ReliabilityIndices,
    aggregate,
    compute_indices,
    merge_intervals,
    number_of_nines,
    percent_difference,
)
from cppds_smcs.sampling import ComponentReliability, RtoParameters


def rec(branch, customers, start, duration, fault_id=0):
    return InterruptionRecord(fault_id, frozenset({branch}), customers, start, duration, "faulted")


def result_from(records, horizon_years):
    down = merge_intervals((r.start, r.end) for r in records)
    return ReplicationResult(0, tuple(records), len(down), sum(b - a for a, b in down), horizon_years * 8760.0)


def test_empty_replication(civanlar):
    idx = compute_indices(result_from([], 1), civanlar[0], 1)
    assert idx == ReliabilityIndices(0.0, 1.0, math.inf, 0.0, 0.0)


def test_one_record(civanlar):
    # branch 4 carries 5 of the 42 customers
    idx = compute_indices(result_from([rec(4, 5, 10.0, 3.0)], 1), civanlar[0], 1)
    assert idx.saidi == pytest.approx(5 * 3 / 42)
    assert idx.saidi == pytest.approx(0.357, abs=5e-4)
    assert idx.saifi == pytest.approx(0.119, abs=5e-4)
    assert idx.failure_rate == 1.0
    assert idx.availability == pytest.approx(1 - 3 / 8760)


def test_overlapping_records_merge(civanlar):
    res = result_from([rec(4, 5, 0.0, 2.0), rec(6, 2, 1.0, 2.0, 1)], 1)
    assert res.down_hours == 3.0
    idx = compute_indices(res, civanlar[0], 1)
    assert idx.failure_rate == 1.0
    assert idx.availability == pytest.approx(1 - 3 / 8760)


def test_touching_intervals_fuse():
    assert merge_intervals([(2, 3), (0, 1), (1, 2), (5, 6)]) == [(0, 3), (5, 6)]


@pytest.mark.parametrize("a, nines", [(0.999, 3.0), (0.9, 1.0), (0.0, 0.0)])
def test_nines(a, nines):
    assert number_of_nines(a) == pytest.approx(nines)


def test_nines_inversion():
    a = 1 - 10 ** -3.386
    assert a == pytest.approx(0.9995889, abs=1e-7)
    assert number_of_nines(a) == pytest.approx(3.386)
    assert number_of_nines(1.0) == math.inf


@pytest.mark.parametrize("a", [-0.1, 1.01, math.nan])
def test_nines_domain(a):
    with pytest.raises(ValueError):
        number_of_nines(a)


@given(st.floats(0, 1), st.floats(0, 1))
def test_nines_monotone(a, b):
    lo, hi = sorted((a, b))
    assert number_of_nines(lo) <= number_of_nines(hi)


def test_aggregate_identical():
    s = ReliabilityIndices(1.3, 0.9995, number_of_nines(0.9995), 0.3, 0.1)
    dist = aggregate([s] * 5)
    assert dist.n == 5
    assert dist.saidi.mean == 0.3 and dist.saidi.std == 0.0
    assert dist.saidi.p5 == dist.saidi.p95 == 0.3


def test_aggregate_two_samples():
    a = ReliabilityIndices(0.0, 1.0, math.inf, 0.0, 0.0)
    b = ReliabilityIndices(2.0, 0.99, 2.0, 2.0, 2.0)
    dist = aggregate([a, b])
    assert dist.saidi.mean == 1.0 and dist.failure_rate.mean == 1.0
    assert dist.nines.mean == 2.0  # infinite sample left out
    assert dist.nines_of_mean == pytest.approx(number_of_nines(0.995))


def test_aggregate_empty():
    with pytest.raises(ValueError):
        aggregate([])


@given(st.lists(st.floats(0, 10), min_size=1, max_size=30))
def test_aggregate_mean_within_range(values):
    dist = aggregate([ReliabilityIndices(v, 1.0, math.inf, v, v) for v in values])
    assert min(values) - 1e-9 <= dist.saidi.mean <= max(values) + 1e-9


def test_percent_difference_reference_row():
    base = {"saidi": 0.953233, "saifi": 0.3, "failure_rate": 1.9, "nines": 3.202699}
    var = {"saidi": 1.136235, "saifi": 0.3, "failure_rate": 1.9, "nines": 3.150581}
    d = percent_difference(base, var)
    assert d["saidi"] == pytest.approx(19.198, abs=5e-4)
    assert d["availability"] == pytest.approx(1.627, abs=5e-4)
    assert d["saifi"] == 0.0 and d["failure_rate"] == 0.0
    assert all(v == 0 for v in percent_difference(base, base).values())


@pytest.mark.parametrize("field, value", [("saidi", 0.0), ("nines", math.inf), ("nines", 0.0)])
def test_percent_difference_bad_baseline(field, value):
    base = {"saidi": 1.0, "saifi": 1.0, "failure_rate": 1.0, "nines": 3.0}
    with pytest.raises(ZeroDivisionError):
        percent_difference({**base, field: value}, base)


def test_indices_recomputed_from_raw_records(civanlar):
    net, cyber = civanlar
    rel = ComponentReliability(0.1, 3.0, 0.6)
    sc = Scenario(net, cyber, rel, ComponentReliability(0.005, 3, 0.6), ComponentReliability(0.01, 3, 0.6),
                  RtoParameters(20, 4), horizon_years=80, replications=4, seed=11)
    for res in run_simulation(sc):
        idx = compute_indices(res, net, sc.horizon_years)
        # oracle: customer counts straight from the network, not from the records
        hours = sum(net.branch(b).customers * r.duration for r in res.records for b in r.branches)
        count = sum(net.branch(b).customers for r in res.records for b in r.branches)
        assert idx.saidi == pytest.approx(hours / 42 / 80, rel=1e-12)
        assert idx.saifi == pytest.approx(count / 42 / 80, rel=1e-12)
        assert sum(r.customers for r in res.records) == count
        assert idx.availability + res.down_hours / sc.horizon_hours == pytest.approx(1.0, abs=1e-15)
        assert res.down_hours <= sum(r.duration for r in res.records) + 1e-9
