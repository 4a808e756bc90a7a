"""Random binary linear codes over GF(2) and their distance profile.

A code maps an m-bit message to an l-bit codeword (l = 2**s) through an
l x m generator matrix.  Words are handled as uint8 bit arrays; message bit 0
is the leftmost character of the textual form.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence, Union

import numpy as np

Word = Union[str, Sequence[int], np.ndarray]

MAX_M = 24
EXACT_M_LIMIT = 20
_SEED_MASK = (1 << 64) - 1
# low message bits enumerated as one table; high bits walk over it
_TABLE_BITS = 16


def as_bits(w: Word, m: int | None = None) -> np.ndarray:
    """Normalise a word given as '0101' text or a 0/1 sequence."""
    if isinstance(w, str):
        if any(ch not in "01" for ch in w):
            raise ValueError(f"word {w!r} has characters outside {{0,1}}")
        bits = np.frombuffer(w.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        bits = np.asarray(w, dtype=np.int64).ravel()
        if bits.size and (bits.min() < 0 or bits.max() > 1):
            raise ValueError("word entries must be 0 or 1")
        bits = bits.astype(np.uint8)
    if m is not None and bits.size != m:
        raise ValueError(f"word length {bits.size} does not match m={m}")
    return bits


def bits_to_str(bits: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in bits)


def int_to_bits(value: int, m: int) -> np.ndarray:
    """Message bit k is bit k of ``value``."""
    return ((value >> np.arange(m)) & 1).astype(np.uint8)


def _pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack the last axis of a 0/1 array into little-endian uint64 limbs."""
    length = bits.shape[-1]
    limbs = -(-length // 64)
    padded = np.zeros(bits.shape[:-1] + (limbs * 64,), dtype=np.uint8)
    padded[..., :length] = bits
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8")


@dataclass(frozen=True)
class LinearCode:
    """An (l, m) binary linear code given by its generator matrix."""

    m: int
    l: int
    generator: np.ndarray = field(repr=False)
    seed: int = 0

    def __post_init__(self):
        gen = np.asarray(self.generator, dtype=np.uint8)
        if gen.shape != (self.l, self.m):
            raise ValueError(f"generator shape {gen.shape} != ({self.l}, {self.m})")
        if self.l < 2 or self.l & (self.l - 1):
            raise ValueError(f"codeword length l={self.l} must be a power of two >= 2")
        if gen.size and gen.max() > 1:
            raise ValueError("generator entries must be 0 or 1")
        gen = gen.copy()
        gen.setflags(write=False)
        object.__setattr__(self, "generator", gen)

    @property
    def s(self) -> int:
        return self.l.bit_length() - 1

    def __eq__(self, other):
        if not isinstance(other, LinearCode):
            return NotImplemented
        return (self.m, self.l, self.seed) == (other.m, other.l, other.seed) and bool(
            np.array_equal(self.generator, other.generator)
        )

    def __hash__(self):
        return hash((self.m, self.l, self.seed, self.generator.tobytes()))

    def packed_columns(self) -> np.ndarray:
        """Generator columns as packed codewords, shape (m, limbs)."""
        return _pack_rows(self.generator.T)

    def codewords(self, messages: np.ndarray) -> np.ndarray:
        """Encode a batch of messages (shape (k, m)) into codewords (k, l)."""
        msgs = np.asarray(messages, dtype=np.int64)
        return ((msgs @ self.generator.T.astype(np.int64)) & 1).astype(np.uint8)


@dataclass(frozen=True)
class CodeMetrics:
    d_min: int
    epsilon: float
    exact: bool

    @property
    def degenerate(self) -> bool:
        return self.d_min == 0


def generate_random_linear_code(m: int, s: int, seed: int) -> LinearCode:
    """Draw an l x m generator (l = 2**s) with i.i.d. uniform bits.

    The matrix is not forced to full rank; a rank-deficient draw shows up as
    ``d_min == 0`` in the metrics.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if m > MAX_M:
        raise ValueError(f"m={m} exceeds the supported maximum {MAX_M}")
    if s < 1:
        raise ValueError("codeword length 2**s must be at least 2")
    seed = int(seed) & _SEED_MASK
    l = 1 << s
    rng = np.random.default_rng(seed)
    generator = rng.integers(0, 2, size=(l, m), dtype=np.uint8)
    return LinearCode(m=m, l=l, generator=generator, seed=seed)


def encode(code: LinearCode, w: Word) -> np.ndarray:
    bits = as_bits(w, code.m).astype(np.int64)
    return ((code.generator.astype(np.int64) @ bits) & 1).astype(np.uint8)


def pair_distance(code: LinearCode, w: Word, w2: Word) -> int:
    """Hamming distance between the codewords of ``w`` and ``w2``."""
    a = as_bits(w, code.m)
    b = as_bits(w2, code.m)
    return int(encode(code, a ^ b).sum())


def _metrics(code: LinearCode, d_min: int, exact: bool) -> CodeMetrics:
    return CodeMetrics(d_min=int(d_min), epsilon=1.0 - d_min / code.l, exact=exact)


def min_distance_exact(code: LinearCode) -> CodeMetrics:
    """Minimum weight over all 2**m - 1 nonzero messages."""
    if code.m > EXACT_M_LIMIT:
        raise ValueError(
            f"m={code.m} is beyond the exhaustive budget (m <= {EXACT_M_LIMIT}); "
            "use min_distance_sampled"
        )
    cols = code.packed_columns()
    low = min(code.m, _TABLE_BITS)
    table = np.zeros((1, cols.shape[1]), dtype=np.uint64)
    for k in range(low):
        table = np.concatenate([table, table ^ cols[k]])
    best = code.l
    for high in range(1 << (code.m - low)):
        offset = np.zeros(cols.shape[1], dtype=np.uint64)
        for k in range(code.m - low):
            if high >> k & 1:
                offset ^= cols[low + k]
        weights = np.bitwise_count(table ^ offset).sum(axis=1)
        if high == 0:
            weights = weights[1:]
        if weights.size:
            best = min(best, int(weights.min()))
        if best == 0:
            break
    return _metrics(code, best, exact=True)


def min_distance_sampled(code: LinearCode, trials: int, seed: int) -> CodeMetrics:
    """Minimum weight over ``trials`` random nonzero messages.

    The estimate can only overshoot the true minimum distance, so the reported
    epsilon is optimistic.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(int(seed) & _SEED_MASK)
    total = (1 << code.m) - 1
    if trials >= total:
        return replace(min_distance_exact(code), exact=False)
    cols = code.packed_columns()
    best = code.l
    chunk = 1 << 14
    done = 0
    while done < trials:
        size = min(chunk, trials - done)
        msgs = rng.integers(1, total + 1, size=size, dtype=np.int64)
        bits = ((msgs[:, None] >> np.arange(code.m)) & 1).astype(np.uint8)
        words = np.zeros((size, cols.shape[1]), dtype=np.uint64)
        for k in range(code.m):
            words ^= np.where(bits[:, k, None] == 1, cols[k], np.uint64(0))
        best = min(best, int(np.bitwise_count(words).sum(axis=1).min()))
        done += size
    return _metrics(code, best, exact=False)


def code_metrics(code: LinearCode, trials: int = 100_000, seed: int = 0) -> CodeMetrics:
    """Exact metrics when affordable, otherwise a sampled estimate."""
    if code.m <= EXACT_M_LIMIT:
        return min_distance_exact(code)
    return min_distance_sampled(code, trials, seed)


def hash_exponent(m: int, c: float = 4.0) -> int:
    """s = ceil(log2(c*m)), never below 1."""
    return max(1, int(np.ceil(np.log2(c * m) - 1e-12)))


def format_code(code: LinearCode) -> str:
    lines = [f"gf2code m={code.m} l={code.l} seed={code.seed}"]
    lines.extend(bits_to_str(row) for row in code.generator)
    return "\n".join(lines) + "\n"


def parse_code(text: str) -> LinearCode:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("gf2code"):
        raise ValueError("missing 'gf2code' header line")
    fields = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
    try:
        m, l, seed = int(fields["m"]), int(fields["l"]), int(fields["seed"])
    except KeyError as exc:
        raise ValueError(f"header lacks field {exc.args[0]}") from None
    rows = lines[1:]
    if len(rows) != l:
        raise ValueError(f"expected {l} generator rows, found {len(rows)}")
    generator = np.array([as_bits(r, m) for r in rows], dtype=np.uint8)
    return LinearCode(m=m, l=l, generator=generator, seed=seed)


def save_code(code: LinearCode, path: str | Path) -> None:
    Path(path).write_text(format_code(code), encoding="ascii")


def load_code(path: str | Path) -> LinearCode:
    return parse_code(Path(path).read_text(encoding="ascii"))
