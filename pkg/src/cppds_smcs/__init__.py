"""Sequential Monte Carlo reliability simulation of cyber-physical distribution feeders."""
from .engine import DEFAULT_SEED, ReplicationResult, Scenario, run_replication, run_simulation
from .indices import (
    IndexDistribution,
    ReliabilityIndices,
    aggregate,
    compute_indices,
    number_of_nines,
    percent_difference,
)
from .sampling import ComponentReliability, RandomStream, RtoParameters
from .topology import build_civanlar, load_network, load_network_file

__all__ = [
    "DEFAULT_SEED",
    "ComponentReliability",
    "IndexDistribution",
    "RandomStream",
    "ReliabilityIndices",
    "ReplicationResult",
    "RtoParameters",
    "Scenario",
    "aggregate",
    "build_civanlar",
    "compute_indices",
    "load_network",
    "load_network_file",
    "number_of_nines",
    "percent_difference",
    "run_replication",
    "run_simulation",
]
