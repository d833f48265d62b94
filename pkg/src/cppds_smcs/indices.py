"""Failure Rate, Availability, SAIDI and SAIFI, per replication and aggregated."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

import numpy as np

from .sampling import HOURS_PER_YEAR

INDEX_NAMES = ("failure_rate", "availability", "nines", "saidi", "saifi")

# number_of_nines(1.0) has no finite value.
PERFECT_NINES = math.inf


@dataclass(frozen=True)
class ReliabilityIndices:
    failure_rate: float  # system failures / year
    availability: float  # fraction of time every customer is served
    nines: float
    saidi: float  # hours / customer / year
    saifi: float  # interruptions / customer / year


@dataclass(frozen=True)
class Summary:
    samples: np.ndarray
    mean: float
    std: float
    p5: float
    p50: float
    p95: float

    @property
    def standard_error(self) -> float:
        return self.std / math.sqrt(len(self.samples))


@dataclass(frozen=True)
class IndexDistribution:
    failure_rate: Summary
    availability: Summary
    nines: Summary
    saidi: Summary
    saifi: Summary

    @property
    def n(self) -> int:
        return len(self.saidi.samples)

    @property
    def nines_of_mean(self) -> float:
        """Nines of the mean availability; what the result tables report."""
        return number_of_nines(self.availability.mean)

    def means(self) -> dict[str, float]:
        out = {name: getattr(self, name).mean for name in INDEX_NAMES}
        out["nines"] = self.nines_of_mean
        return out


def number_of_nines(availability: float) -> float:
    if not 0.0 <= availability <= 1.0:
        raise ValueError(f"availability must lie in [0, 1], got {availability}")
    if availability == 1.0:
        return PERFECT_NINES
    return -math.log10(1.0 - availability)


def merge_intervals(intervals: Iterable[tuple[float, float]]) -> list[tuple[float, float]]:
    """Union of closed intervals; touching intervals fuse."""
    merged: list[list[float]] = []
    for start, end in sorted(intervals):
        if merged and start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    return [(a, b) for a, b in merged]


def tally_by_branch(records) -> dict[int, tuple[int, float]]:
    """Per load point: (interruption count, outage hours) over the whole horizon."""
    tallies: dict[int, list] = {}
    for rec in records:
        for b in rec.branches:
            entry = tallies.setdefault(b, [0, 0.0])
            entry[0] += 1
            entry[1] += rec.duration
    return {b: (c, h) for b, (c, h) in tallies.items()}


def compute_indices(result, net, horizon_years: float) -> ReliabilityIndices:
    """Indices of one replication.

    Load points are branches; their interruption frequency and annual
    outage time come from the records, weighted by the branch's customers.
    """
    horizon_hours = horizon_years * HOURS_PER_YEAR
    availability = 1.0 - result.down_hours / horizon_hours
    availability = min(max(availability, 0.0), 1.0)
    customer_hours = 0.0
    customer_interruptions = 0
    for branch, (count, hours) in tally_by_branch(result.records).items():
        n = net.branch(branch).customers
        customer_hours += hours * n
        customer_interruptions += count * n
    total = net.total_customers
    return ReliabilityIndices(
        failure_rate=result.failure_count / horizon_years,
        availability=availability,
        nines=number_of_nines(availability),
        saidi=customer_hours / total / horizon_years if total else 0.0,
        saifi=customer_interruptions / total / horizon_years if total else 0.0,
    )


def _summary(values: Sequence[float]) -> Summary:
    arr = np.asarray(values, dtype=float)
    # fault-free replications have infinite nines; statistics use the finite ones
    finite = arr[np.isfinite(arr)]
    if finite.size == 0:
        return Summary(arr, math.inf, 0.0, math.inf, math.inf, math.inf)
    std = float(np.std(finite, ddof=1)) if finite.size > 1 else 0.0
    p5, p50, p95 = np.percentile(finite, [5, 50, 95])
    return Summary(arr, float(np.mean(finite)), std, float(p5), float(p50), float(p95))


def aggregate(samples: Sequence[ReliabilityIndices]) -> IndexDistribution:
    if not samples:
        raise ValueError("cannot aggregate an empty sample list")
    return IndexDistribution(
        **{f.name: _summary([getattr(s, f.name) for s in samples]) for f in fields(ReliabilityIndices)}
    )


def percent_difference(baseline: dict[str, float], variant: dict[str, float]) -> dict[str, float]:
    """Relative change of a variant's means against a baseline, in percent.

    SAIDI, SAIFI and failure rate use (variant - baseline) / baseline.
    Availability is compared on the nines scale as a loss,
    (nines_baseline - nines_variant) / nines_baseline, so a worse variant
    gives a positive figure like the SAIDI column.
    """
    out = {}
    for name in ("saidi", "saifi", "failure_rate"):
        base = baseline[name]
        if base == 0:
            raise ZeroDivisionError(f"baseline {name} is zero")
        out[name] = 100.0 * (variant[name] - base) / base
    base = baseline["nines"]
    if base == 0 or math.isinf(base):
        raise ZeroDivisionError(f"baseline nines {base} gives no relative difference")
    out["availability"] = 100.0 * (base - variant["nines"]) / base
    return out
