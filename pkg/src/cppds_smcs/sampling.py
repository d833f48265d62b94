"""Random variates for failure, repair and operator response times.

All times leave this module in hours. Failure rates are given per year and
operator response parameters in minutes; conversion happens at sample time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

HOURS_PER_YEAR = 8760.0
MINUTES_PER_HOUR = 60.0

# Substream key for the operator-response draws. Component kinds use 0..2.
RTO_STREAM_KIND = 3


class ParameterError(ValueError):
    """Raised for reliability or sampling parameters outside their domain."""


@dataclass(frozen=True)
class ComponentReliability:
    """Failure rate (1/yr) and normal repair-time law (hours) of a component class."""

    failure_rate: float
    repair_mean: float
    repair_std: float

    def __post_init__(self):
        if not self.failure_rate >= 0:
            raise ParameterError(f"failure_rate must be >= 0, got {self.failure_rate}")
        if not self.repair_mean > 0:
            raise ParameterError(f"repair_mean must be > 0, got {self.repair_mean}")
        if not self.repair_std >= 0:
            raise ParameterError(f"repair_std must be >= 0, got {self.repair_std}")
        if not self.repair_std < self.repair_mean:
            raise ParameterError(
                f"repair_std ({self.repair_std}) must be below repair_mean ({self.repair_mean})"
            )


@dataclass(frozen=True)
class RtoParameters:
    """Mean and standard deviation of the operator response time, in minutes."""

    mu: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if not self.mu >= 0:
            raise ParameterError(f"mu_rto must be >= 0, got {self.mu}")
        if not self.sigma >= 0:
            raise ParameterError(f"sigma_rto must be >= 0, got {self.sigma}")
        if self.mu == 0 and self.sigma != 0:
            raise ParameterError("sigma_rto must be 0 when mu_rto is 0")


class RandomStream:
    """Seedable uniform source backed by numpy's PCG64.

    ``RandomStream.for_component(seed, replication, kind, index)`` derives
    an independent substream through :class:`numpy.random.SeedSequence`
    spawn keys, so the same (seed, replication, component) always yields the
    same draws regardless of what other streams were consumed.
    """

    def __init__(self, seed: int | np.random.SeedSequence = 0):
        if isinstance(seed, np.random.SeedSequence):
            seq = seed
        else:
            seq = np.random.SeedSequence(int(seed))
        self.seed_sequence = seq
        self._gen = np.random.Generator(np.random.PCG64(seq))

    @classmethod
    def for_component(cls, seed: int, replication: int, kind: int, index: int) -> "RandomStream":
        seq = np.random.SeedSequence(int(seed), spawn_key=(int(replication), int(kind), int(index)))
        return cls(seq)

    @property
    def state(self) -> dict[str, Any]:
        return self._gen.bit_generator.state

    def uniform_open_closed(self, size=None):
        """U on (0, 1]: safe to pass to ``log``."""
        return 1.0 - self._gen.random(size)

    def uniform(self, size=None):
        """U on [0, 1)."""
        return self._gen.random(size)


def _exp_from_uniform(failure_rate: float, u):
    return -np.log(u) / failure_rate * HOURS_PER_YEAR


def _box_muller(u1, u2):
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def sample_time_to_failure(failure_rate: float, stream: RandomStream, size=None):
    """Exponential time to failure in hours by inverse transform."""
    if not failure_rate > 0:
        raise ParameterError(
            f"failure_rate must be > 0 to sample a failure time, got {failure_rate}"
        )
    u = stream.uniform_open_closed(size)
    if size is None:
        return -math.log(u) / failure_rate * HOURS_PER_YEAR
    return _exp_from_uniform(failure_rate, u)


def sample_standard_normal(stream: RandomStream, size=None):
    """Box-Muller draw(s) from N(0, 1); consumes U1 then U2 per variate."""
    if size is None:
        u1 = stream.uniform_open_closed()
        u2 = stream.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
    u = stream.uniform(size=(2,) + tuple(np.atleast_1d(size)))
    return _box_muller(1.0 - u[0], u[1])


def _positive_normal(mean: float, std: float, stream: RandomStream, strict: bool) -> float:
    # Resample rejected draws; at mean = 5 std the loop almost never repeats.
    while True:
        value = sample_standard_normal(stream) * std + mean
        if value > 0 or (not strict and value == 0):
            return value


def _positive_normal_array(mean: float, std: float, stream: RandomStream, size, strict: bool):
    out = sample_standard_normal(stream, size) * std + mean
    bad = out <= 0 if strict else out < 0
    while bad.any():
        out[bad] = sample_standard_normal(stream, int(bad.sum())) * std + mean
        bad = out <= 0 if strict else out < 0
    return out


def sample_repair_time(params: ComponentReliability, stream: RandomStream, size=None):
    """Normal repair time in hours, redrawn until strictly positive."""
    if size is None:
        return _positive_normal(params.repair_mean, params.repair_std, stream, strict=True)
    return _positive_normal_array(params.repair_mean, params.repair_std, stream, size, strict=True)


def sample_rto(params: RtoParameters, stream: RandomStream, size=None):
    """Operator response time in minutes, redrawn until non-negative.

    ``mu == 0`` returns 0 without touching the stream, which keeps the
    zero-response scenario on the same random path as the others.
    """
    if params.mu == 0:
        return 0.0 if size is None else np.zeros(size)
    if size is None:
        return _positive_normal(params.mu, params.sigma, stream, strict=False)
    return _positive_normal_array(params.mu, params.sigma, stream, size, strict=False)


def rto_hours(params: RtoParameters, stream: RandomStream) -> float:
    return sample_rto(params, stream) / MINUTES_PER_HOUR
