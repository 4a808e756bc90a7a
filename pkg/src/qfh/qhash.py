"""Quantum hash functions: the abstract interface and the code fingerprint.

Any hash used by the search must satisfy one law: ``apply_inverse`` maps
``state_of(w)`` back to the all-zero block.  The search's good states are
defined relative to that zero block.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from . import qstate
from .gf2code import (
    CodeMetrics,
    LinearCode,
    Word,
    _pack_rows,
    as_bits,
    code_metrics,
    int_to_bits,
    pair_distance,
)
from .qstate import RegisterLayout, StateVector

EXHAUSTIVE_PAIR_M = 10


@dataclass(frozen=True)
class HashSpec:
    m: int
    epsilon: float
    s: int

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon={self.epsilon} outside [0, 1]")
        if self.s < 1:
            raise ValueError("s must be >= 1")

    @property
    def stable(self) -> bool:
        """False for degenerate hashes that are not epsilon-stable for any epsilon < 1."""
        return self.epsilon < 1.0


class QuantumHash(ABC):
    """An (m, epsilon, s) quantum hash acting on ``block_width`` qubits."""

    spec: HashSpec
    exact: bool = True

    @property
    @abstractmethod
    def block_width(self) -> int: ...

    @abstractmethod
    def apply_forward(self, state: StateVector, w: Word,
                      layout: RegisterLayout | None = None) -> StateVector: ...

    @abstractmethod
    def apply_inverse(self, state: StateVector, w: Word,
                      layout: RegisterLayout | None = None) -> StateVector: ...

    def block_layout(self) -> RegisterLayout:
        return RegisterLayout.for_block(self.block_width - 1)

    def state_of(self, w: Word) -> StateVector:
        layout = self.block_layout()
        return self.apply_forward(qstate.zero_state(layout), w, layout)

    def prepare_blocks(self, state: StateVector, layout: RegisterLayout,
                       words: Sequence[Word]) -> StateVector:
        """Apply the forward map of ``words[j]`` to the hash block of index j.

        Generic fallback: one block at a time.  Implementations with a
        vectorised form should override it.
        """
        if len(words) != layout.n:
            raise ValueError(f"{len(words)} words for {layout.n} index values")
        view = state.view(layout).copy()
        block = self.block_layout()
        for j, w in enumerate(words):
            for f in range(view.shape[3]):
                sub = StateVector(block.q, view[j, :, :, f].ravel())
                view[j, :, :, f] = self.apply_forward(sub, w, block).amplitudes.reshape(block.l, 2)
        return StateVector(state.q, view.ravel())

    def _layout(self, state: StateVector, layout: RegisterLayout | None) -> RegisterLayout:
        layout = layout or self.block_layout()
        if layout.block_width != self.block_width or layout.q != state.q:
            raise ValueError(
                f"hash block of {self.block_width} qubits does not fit layout {layout} "
                f"with a {state.q}-qubit state"
            )
        return layout


class FingerprintHash(QuantumHash):
    """|psi(w)> = 2**(-s/2) sum_i |i>|E_i(w)>, built from a linear code."""

    def __init__(self, code: LinearCode, metrics: CodeMetrics | None = None):
        self.code = code
        self.metrics = metrics if metrics is not None else code_metrics(code)
        self.exact = self.metrics.exact
        self.spec = HashSpec(m=code.m, epsilon=self.metrics.epsilon, s=code.s)

    def __repr__(self):
        return f"FingerprintHash(m={self.code.m}, l={self.code.l}, epsilon={self.spec.epsilon:.4f})"

    @property
    def block_width(self) -> int:
        return self.code.s + 1

    def apply_forward(self, state, w, layout=None):
        layout = self._layout(state, layout)
        out = qstate.hadamard_hash_index(state, layout)
        return qstate.codeword_xor(out, layout, self.code, w)

    def apply_inverse(self, state, w, layout=None):
        layout = self._layout(state, layout)
        out = qstate.codeword_xor(state, layout, self.code, w)
        return qstate.hadamard_hash_index(out, layout)

    def prepare_blocks(self, state, layout, words):
        if len(words) != layout.n:
            raise ValueError(f"{len(words)} words for {layout.n} index values")
        layout = self._layout(state, layout)
        table = self.codeword_table(words)
        out = qstate.hadamard_hash_index(state, layout)
        return qstate.codeword_xor_bits(out, layout, table.astype(bool))

    def codeword_table(self, words: Sequence[Word]) -> np.ndarray:
        msgs = np.array([as_bits(w, self.code.m) for w in words], dtype=np.uint8)
        return self.code.codewords(msgs.reshape(len(words), self.code.m))

    def distance(self, w: Word, w2: Word) -> int:
        return pair_distance(self.code, w, w2)


def state_of(hash_fn: QuantumHash, w: Word) -> StateVector:
    return hash_fn.state_of(w)


def apply_forward(hash_fn: QuantumHash, state: StateVector, w: Word,
                  layout: RegisterLayout | None = None) -> StateVector:
    return hash_fn.apply_forward(state, w, layout)


def apply_inverse(hash_fn: QuantumHash, state: StateVector, w: Word,
                  layout: RegisterLayout | None = None) -> StateVector:
    return hash_fn.apply_inverse(state, w, layout)


def overlap(hash_fn: QuantumHash, w: Word, w2: Word) -> float:
    """Signed overlap <psi(w)|psi(w2)>; for fingerprints this is 1 - d/l."""
    if isinstance(hash_fn, FingerprintHash):
        return 1.0 - hash_fn.distance(w, w2) / hash_fn.code.l
    return qstate.inner_product(hash_fn.state_of(w), hash_fn.state_of(w2))


def epsilon_stability_check(hash_fn: QuantumHash, sample_pairs: int | None = None,
                            seed: int = 0) -> float:
    """Largest |overlap| over distinct word pairs.

    Exhaustive for m <= 10; beyond that ``sample_pairs`` random pairs must be
    requested explicitly.
    """
    m = hash_fn.spec.m
    if m <= EXHAUSTIVE_PAIR_M:
        worst = _max_overlap_exhaustive(hash_fn)
        if hash_fn.exact and worst > hash_fn.spec.epsilon + 1e-12:
            raise RuntimeError(
                f"max overlap {worst} exceeds the hash's epsilon {hash_fn.spec.epsilon}"
            )
        return worst
    if sample_pairs is None:
        raise ValueError(
            f"m={m} exceeds the exhaustive pair budget (m <= {EXHAUSTIVE_PAIR_M}); "
            "pass sample_pairs"
        )
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(sample_pairs):
        a = rng.integers(0, 2, size=m, dtype=np.uint8)
        b = rng.integers(0, 2, size=m, dtype=np.uint8)
        if np.array_equal(a, b):
            continue
        worst = max(worst, abs(overlap(hash_fn, a, b)))
    return worst


def _max_overlap_exhaustive(hash_fn: QuantumHash) -> float:
    m = hash_fn.spec.m
    if isinstance(hash_fn, FingerprintHash):
        msgs = np.array([int_to_bits(v, m) for v in range(1 << m)])
        packed = _pack_rows(hash_fn.code.codewords(msgs))
        l = hash_fn.code.l
        worst = -np.inf
        for a in range(len(packed) - 1):
            d = np.bitwise_count(packed[a + 1:] ^ packed[a]).sum(axis=1)
            worst = max(worst, float(np.max(np.abs(1.0 - d / l))))
        return float(worst)
    states = [hash_fn.state_of(int_to_bits(v, m)) for v in range(1 << m)]
    return max(abs(qstate.inner_product(a, b)) for a, b in combinations(states, 2))


def min_qubits_bound(m: float, epsilon: float) -> float:
    """Lower bound on the hash output size: log m - log log(1 + sqrt(2/(1-eps))) - 1, base 2."""
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}")
    if m < 2:
        raise ValueError("m must be >= 2")
    return math.log2(m) - math.log2(math.log2(1.0 + math.sqrt(2.0 / (1.0 - epsilon)))) - 1.0
