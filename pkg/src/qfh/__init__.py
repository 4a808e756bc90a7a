"""Dictionary search with quantum fingerprint hashing and amplitude amplification."""

from .gf2code import (
    CodeMetrics,
    LinearCode,
    encode,
    generate_random_linear_code,
    min_distance_exact,
    min_distance_sampled,
    pair_distance,
)
from .qhash import FingerprintHash, HashSpec, QuantumHash, min_qubits_bound, overlap
from .qstate import GoodMask, RegisterLayout, StateVector
from .report import RunReport
from .search import IterationPolicy, SearchInstance, Status, run_search

__version__ = "0.1.0"

__all__ = [
    "CodeMetrics", "LinearCode", "encode", "generate_random_linear_code", "min_distance_exact",
    "min_distance_sampled", "pair_distance", "FingerprintHash", "HashSpec", "QuantumHash",
    "min_qubits_bound", "overlap", "GoodMask", "RegisterLayout", "StateVector", "RunReport",
    "IterationPolicy", "SearchInstance", "Status", "run_search",
]
