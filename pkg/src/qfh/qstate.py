"""Real-amplitude state vectors over the search register layout.

Basis index packing, most significant first::

    index = ((j * 2**(s+1) + (i*2 + b)) * 2 + f)

with j the dictionary index, i the code position, b the hash target bit and
f the constant flag.  Every operator used by the search is real-orthogonal,
so amplitudes are stored as float64.
"""
from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .gf2code import LinearCode, Word, encode

MAX_QUBITS = 26
NORM_TOL = 1e-10
AXIS_TOL = 1e-8

REGISTERS = ("index", "hash_index", "hash_target", "flag")

_DUMP_MAGIC = b"QFHS"


class QubitBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class RegisterLayout:
    """Register widths.  ``flag_bits`` is 1 for a search layout and 0 for a
    bare hash block (used when a hash acts on its own s+1 qubits)."""

    idx_bits: int
    hash_idx_bits: int
    flag_bits: int = 1

    def __post_init__(self):
        if self.idx_bits < 0 or self.hash_idx_bits < 1 or self.flag_bits not in (0, 1):
            raise ValueError(f"invalid layout {self}")

    @classmethod
    def for_block(cls, s: int) -> "RegisterLayout":
        return cls(idx_bits=0, hash_idx_bits=s, flag_bits=0)

    @property
    def n(self) -> int:
        return 1 << self.idx_bits

    @property
    def l(self) -> int:
        return 1 << self.hash_idx_bits

    @property
    def block_width(self) -> int:
        return self.hash_idx_bits + 1

    @property
    def q(self) -> int:
        return self.idx_bits + self.hash_idx_bits + 1 + self.flag_bits

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.n, self.l, 2, 1 << self.flag_bits)

    def index(self, j: int, i: int = 0, b: int = 0, f: int = 1) -> int:
        f = f if self.flag_bits else 0
        return ((j * (self.l << 1) + (i * 2 + b)) << self.flag_bits) + f

    def decode(self, basis: np.ndarray) -> dict[str, np.ndarray]:
        basis = np.asarray(basis, dtype=np.int64)
        f = basis & 1 if self.flag_bits else np.zeros_like(basis)
        rest = basis >> self.flag_bits
        return {
            "index": rest >> self.block_width,
            "hash_index": (rest >> 1) & (self.l - 1),
            "hash_target": rest & 1,
            "flag": f,
        }


@dataclass
class StateVector:
    q: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.float64)
        if self.amplitudes.shape != (1 << self.q,):
            raise ValueError(f"expected {1 << self.q} amplitudes, got {self.amplitudes.shape}")

    def copy(self) -> "StateVector":
        return StateVector(self.q, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def view(self, layout: RegisterLayout) -> np.ndarray:
        if layout.q != self.q:
            raise ValueError(f"layout has {layout.q} qubits, state has {self.q}")
        return self.amplitudes.reshape(layout.shape)


@dataclass(frozen=True)
class GoodMask:
    """Selects the basis states |j>|0...0>|1> of a search layout."""

    layout: RegisterLayout

    def indices(self) -> np.ndarray:
        lay = self.layout
        stride = lay.l << (1 + lay.flag_bits)
        return np.arange(lay.n, dtype=np.int64) * stride + lay.flag_bits

    def __len__(self) -> int:
        return self.layout.n


Mask = Union[GoodMask, Sequence[int], np.ndarray, int]


def _mask_indices(mask: Mask) -> np.ndarray:
    if isinstance(mask, GoodMask):
        return mask.indices()
    return np.atleast_1d(np.asarray(mask, dtype=np.int64))


def check_budget(q: int) -> None:
    if q > MAX_QUBITS:
        raise QubitBudgetError(f"{q} qubits exceeds the budget of {MAX_QUBITS}")


def zero_state(layout: RegisterLayout) -> StateVector:
    check_budget(layout.q)
    amps = np.zeros(1 << layout.q)
    amps[0] = 1.0
    return StateVector(layout.q, amps)


def basis_state(q: int, index: int) -> StateVector:
    check_budget(q)
    amps = np.zeros(1 << q)
    amps[index] = 1.0
    return StateVector(q, amps)


def uniform_index_and_flag(state: StateVector, layout: RegisterLayout) -> StateVector:
    """|0...0> -> (1/sqrt(n)) sum_j |j>|0>|1>."""
    if abs(state.amplitudes[0] - 1.0) > NORM_TOL or np.count_nonzero(state.amplitudes) != 1:
        raise ValueError("uniform_index_and_flag expects the all-zero state")
    out = np.zeros(layout.shape)
    out[:, 0, 0, -1] = 1.0 / np.sqrt(layout.n)
    return StateVector(layout.q, out.ravel())


def _walsh_hadamard(block: np.ndarray, axis: int, s: int) -> np.ndarray:
    """Normalised Walsh-Hadamard transform of length 2**s along ``axis``."""
    shape = block.shape
    x = block.reshape(shape[:axis] + (2,) * s + shape[axis + 1:])
    for k in range(s):
        ax = axis + k
        a = x.take(0, axis=ax)
        b = x.take(1, axis=ax)
        x = np.stack([a + b, a - b], axis=ax)
    return (x / np.sqrt(1 << s)).reshape(shape)


def hadamard_hash_index(state: StateVector, layout: RegisterLayout) -> StateVector:
    """H on each hash-index qubit, inside every (j, b, f) block."""
    out = _walsh_hadamard(state.view(layout), axis=1, s=layout.hash_idx_bits)
    return StateVector(state.q, out.ravel())


def codeword_xor(
    state: StateVector, layout: RegisterLayout, code: LinearCode, w: Word
) -> StateVector:
    """b -> b xor E_i(w), i being the hash-index value."""
    if code.l != layout.l:
        raise ValueError(f"code length {code.l} does not match register size {layout.l}")
    flip = encode(code, w).astype(bool)
    return codeword_xor_bits(state, layout, flip)


def codeword_xor_bits(state: StateVector, layout: RegisterLayout, flip: np.ndarray) -> StateVector:
    """Per-block variant: ``flip`` is (l,) shared or (n, l) one row per index."""
    flip = np.asarray(flip, dtype=bool)
    view = state.view(layout)
    swapped = view[:, :, ::-1, :]
    if flip.ndim == 1:
        sel = flip[None, :, None, None]
    else:
        if flip.shape != (layout.n, layout.l):
            raise ValueError(f"flip table shape {flip.shape} does not match layout")
        sel = flip[:, :, None, None]
    out = np.where(sel, swapped, view)
    return StateVector(state.q, out.ravel())


def reflect_about(state: StateVector, axis: StateVector) -> StateVector:
    """2|a><a| - I."""
    if axis.q != state.q:
        raise ValueError("axis and state differ in size")
    if abs(axis.norm() - 1.0) > AXIS_TOL:
        raise ValueError(f"reflection axis must be a unit vector (norm {axis.norm():.3g})")
    a = axis.amplitudes
    return StateVector(state.q, 2.0 * np.dot(a, state.amplitudes) * a - state.amplitudes)


def phase_flip(state: StateVector, mask: Mask) -> StateVector:
    out = state.amplitudes.copy()
    out[_mask_indices(mask)] *= -1.0
    return StateVector(state.q, out)


def inner_product(a: StateVector, b: StateVector) -> float:
    if a.q != b.q:
        raise ValueError(f"dimension mismatch: {a.q} vs {b.q} qubits")
    return float(np.dot(a.amplitudes, b.amplitudes))


def probability_of(state: StateVector, mask: Mask) -> float:
    idx = _mask_indices(mask)
    return float(np.sum(state.amplitudes[idx] ** 2))


def probabilities(state: StateVector) -> np.ndarray:
    p = state.amplitudes ** 2
    return p / p.sum()


def marginal(
    state: StateVector, layout: RegisterLayout, registers: Iterable[str] | None = None
) -> dict[tuple[int, ...], float]:
    """Exact outcome distribution over the selected registers."""
    regs = _registers(registers)
    p = probabilities(state)
    support = np.flatnonzero(p)
    keys = _outcome_keys(layout, support, regs)
    dist: dict[tuple[int, ...], float] = {}
    for key, prob in zip(keys, p[support]):
        dist[key] = dist.get(key, 0.0) + float(prob)
    return dist


def _registers(registers: Iterable[str] | None) -> tuple[str, ...]:
    regs = tuple(REGISTERS if registers is None else registers)
    unknown = set(regs) - set(REGISTERS)
    if unknown:
        raise ValueError(f"unknown registers {sorted(unknown)}; choose from {REGISTERS}")
    return regs


def _outcome_keys(layout: RegisterLayout, basis: np.ndarray, regs: tuple[str, ...]):
    fields = layout.decode(basis)
    cols = [fields[r].tolist() for r in regs]
    return list(zip(*cols)) if cols else [()] * len(basis)


def sample_basis(state: StateVector, shots: int, seed: int) -> np.ndarray:
    """``shots`` i.i.d. basis indices drawn from the squared amplitudes."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(int(seed) & ((1 << 64) - 1))
    p = probabilities(state)
    cdf = np.cumsum(p)
    draws = np.searchsorted(cdf, rng.random(shots) * cdf[-1], side="right")
    return np.minimum(draws, p.size - 1)


def sample(
    state: StateVector,
    layout: RegisterLayout,
    registers: Iterable[str] | None,
    shots: int,
    seed: int,
) -> Counter:
    """Histogram of measured register tuples, in ``registers`` order."""
    regs = _registers(registers)
    draws = sample_basis(state, shots, seed)
    return Counter(_outcome_keys(layout, draws, regs))


def dump_state(state: StateVector, layout: RegisterLayout, path: str | Path) -> None:
    header = _DUMP_MAGIC + struct.pack("<BBBBII", state.q, layout.idx_bits,
                                       layout.hash_idx_bits, layout.flag_bits, 0, 0)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(state.amplitudes.astype("<f8").tobytes())


def load_state(path: str | Path) -> tuple[StateVector, RegisterLayout]:
    raw = Path(path).read_bytes()
    if raw[:4] != _DUMP_MAGIC:
        raise ValueError("not a state dump (bad magic)")
    q, idx_bits, hash_idx_bits, flag_bits = struct.unpack("<BBBB", raw[4:8])
    layout = RegisterLayout(idx_bits, hash_idx_bits, flag_bits)
    amps = np.frombuffer(raw[16:], dtype="<f8").astype(np.float64)
    if layout.q != q:
        raise ValueError("state dump header is inconsistent")
    return StateVector(q, amps), layout
