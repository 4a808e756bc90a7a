"""Independent oracles for the search pipeline.

``dense_pipeline`` rebuilds every stage from explicit 2**q x 2**q matrices
(complex dtype, so realness of the operators is itself checked), sharing
nothing with the structured engine beyond the code's generator matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .gf2code import Word, as_bits, bits_to_str
from .qhash import FingerprintHash
from .qstate import GoodMask, RegisterLayout, StateVector
from .report import (  # noqa: F401  re-exported
    RunReport,
    SuccessBoundVerdict,
    MinQubitVerdict,
    resource_report,
    theorem2_check,
    theorem3_check,
    min_qubit_verdict,
)
from .search import SearchInstance, apply_conversion, build_dictionary_state, choose_iterations

DENSE_MAX_QUBITS = 12
IMAG_TOL = 1e-12

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
_I = np.eye(2, dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)


def classical_search(V: Sequence[Word], w: Word) -> list[int]:
    """Linear scan; the ground truth for every quantum run."""
    target = bits_to_str(as_bits(w))
    words = [bits_to_str(as_bits(v)) for v in V]
    if len({len(v) for v in words} | {len(target)}) != 1:
        raise ValueError("dictionary and query word lengths differ")
    return [j for j, v in enumerate(words) if v == target]


def _kron(*mats: np.ndarray) -> np.ndarray:
    return reduce(np.kron, mats, np.ones((1, 1), dtype=np.complex128))


def _hadamards(k: int) -> np.ndarray:
    return _kron(*([_H] * k))


def _eye(k: int) -> np.ndarray:
    return np.eye(1 << k, dtype=np.complex128)


def _codeword_permutation(bits: np.ndarray) -> np.ndarray:
    """U_E on one hash block: |i, b> -> |i, b xor E_i>."""
    l = bits.size
    perm = np.zeros((2 * l, 2 * l), dtype=np.complex128)
    for i in range(l):
        for b in range(2):
            perm[2 * i + (b ^ int(bits[i])), 2 * i + b] = 1.0
    return perm


def _codeword(hash_fn: FingerprintHash, w: Word) -> np.ndarray:
    g = hash_fn.code.generator.astype(np.int64)
    return (g @ as_bits(w, hash_fn.code.m).astype(np.int64)) % 2


@dataclass
class DenseRun:
    stages: dict[str, StateVector]
    t: int
    imag_residue: float


def dense_stages(instance: SearchInstance, t: int | None = None) -> DenseRun:
    """All stage states of the pipeline, from explicit matrices."""
    hash_fn = instance.hash
    if not isinstance(hash_fn, FingerprintHash):
        raise TypeError("the dense oracle is defined for fingerprint hashes only")
    layout = instance.layout()
    q = layout.q
    if q > DENSE_MAX_QUBITS:
        raise ValueError(f"dense oracle limited to {DENSE_MAX_QUBITS} qubits, instance needs {q}")
    s, idx_bits, dim = layout.hash_idx_bits, layout.idx_bits, 1 << q
    residue = 0.0

    def real(vec: np.ndarray) -> StateVector:
        nonlocal residue
        residue = max(residue, float(np.max(np.abs(vec.imag))))
        return StateVector(q, vec.real.copy())

    zero = np.zeros(dim, dtype=np.complex128)
    zero[0] = 1.0
    prep = _kron(_hadamards(idx_bits), _eye(s + 1), _X)
    initial = prep @ zero
    del prep

    block_h = _kron(_hadamards(s), _I)
    controlled = np.zeros((dim, dim), dtype=np.complex128)
    span = 2 * layout.l * 2
    for j, word in enumerate(instance.V):
        forward = _codeword_permutation(_codeword(hash_fn, word)) @ block_h
        controlled[j * span:(j + 1) * span, j * span:(j + 1) * span] = np.kron(forward, _I)
    dictionary = controlled @ initial
    del controlled

    inverse = block_h @ _codeword_permutation(_codeword(hash_fn, instance.w))
    conversion = _kron(_eye(idx_bits), inverse, _I)
    converted = conversion @ dictionary
    del conversion

    good = np.zeros(dim, dtype=bool)
    good[GoodMask(layout).indices()] = True
    flip = np.diag(np.where(good, -1.0, 1.0)).astype(np.complex128)
    reflection = 2.0 * np.outer(converted, converted.conj()) - np.eye(dim, dtype=np.complex128)

    if t is None:
        p_good = float(np.sum(np.abs(converted[good]) ** 2))
        t = choose_iterations(p_good, instance.policy, instance.n)
    final = converted
    for _ in range(t):
        final = reflection @ (flip @ final)

    stages = {"initial": real(initial), "dictionary": real(dictionary),
              "converted": real(converted), "final": real(final)}
    if residue > IMAG_TOL:
        raise RuntimeError(f"dense oracle produced imaginary residue {residue}")
    return DenseRun(stages=stages, t=t, imag_residue=residue)


def dense_pipeline(instance: SearchInstance, t: int | None = None) -> StateVector:
    return dense_stages(instance, t).stages["final"]


@dataclass(frozen=True)
class ConversionRow:
    j: int
    d: int
    alpha0: float
    match: bool


def lemma1_table(V: Sequence[Word], w: Word, hash_fn: FingerprintHash) -> list[ConversionRow]:
    """Per-block zero amplitude after conversion, rescaled by sqrt(n)."""
    n = len(V)
    layout = RegisterLayout(idx_bits=n.bit_length() - 1, hash_idx_bits=hash_fn.block_width - 1)
    converted = apply_conversion(build_dictionary_state(V, hash_fn, layout), w, hash_fn, layout)
    alphas = converted.amplitudes[GoodMask(layout).indices()] * np.sqrt(n)
    table = hash_fn.codeword_table(list(V)) ^ hash_fn.codeword_table([w])
    target = bits_to_str(as_bits(w, hash_fn.code.m))
    rows = []
    for j, v in enumerate(V):
        match = bits_to_str(as_bits(v, hash_fn.code.m)) == target
        alpha = float(alphas[j])
        if match:
            if abs(alpha - 1.0) > 1e-12:
                raise RuntimeError(f"matching block {j} has zero amplitude {alpha}, expected 1")
            alpha = 1.0
        rows.append(ConversionRow(j=j, d=int(table[j].sum()), alpha0=alpha, match=match))
    return rows
