"""Dictionary search by fingerprint hashing and amplitude amplification.

Pipeline: prepare (1/sqrt(n)) sum_j |j>|psi(w_j)>|1>, undo the hash of the
query word in every block, amplify the good states |j>|0...0>|1>, measure,
and verify the decoded index classically.
"""
from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import qstate
from .gf2code import Word, as_bits, bits_to_str
from .qhash import FingerprintHash, QuantumHash
from .qstate import GoodMask, RegisterLayout, StateVector
from .report import RunReport, resource_report, success_lower_bound, theorem2_check

MAX_DICT_LINES = 1 << 20
NORM_TOL = 1e-10


class AmplificationUndefined(ValueError):
    pass


class Status(str, enum.Enum):
    FOUND = "Found"
    NOT_FOUND = "NotFound"
    HASH_NONZERO = "HashNonzero"


@dataclass(frozen=True)
class IterationPolicy:
    kind: str = "exact"
    t: int | None = None

    def __post_init__(self):
        if self.kind not in ("exact", "blind", "fixed"):
            raise ValueError(f"unknown iteration policy {self.kind!r}")
        if self.kind == "fixed" and (self.t is None or self.t < 0):
            raise ValueError("fixed policy needs a non-negative t")

    @classmethod
    def parse(cls, text: str) -> "IterationPolicy":
        kind, _, arg = text.strip().lower().partition(":")
        if kind == "fixed":
            if not arg.isdigit():
                raise ValueError(f"bad fixed policy {text!r}; expected fixed:<t>")
            return cls("fixed", int(arg))
        if arg:
            raise ValueError(f"policy {kind!r} takes no argument")
        return cls(kind)

    def __str__(self):
        return f"fixed:{self.t}" if self.kind == "fixed" else self.kind


@dataclass
class SearchInstance:
    V: Sequence[Word]
    w: Word
    hash: QuantumHash
    policy: IterationPolicy = field(default_factory=IterationPolicy)
    seed: int = 0
    shots: int = 0
    n_input: int | None = None

    def __post_init__(self):
        m = self.hash.spec.m
        self.V = tuple(bits_to_str(as_bits(v, m)) for v in self.V)
        self.w = bits_to_str(as_bits(self.w, m))
        n = len(self.V)
        if n < 1 or n & (n - 1):
            raise ValueError(f"dictionary size {n} is not a power of two")
        if self.shots < 0:
            raise ValueError("shots must be >= 0")
        if self.n_input is None:
            self.n_input = n

    @property
    def n(self) -> int:
        return len(self.V)

    def layout(self) -> RegisterLayout:
        return RegisterLayout(idx_bits=self.n.bit_length() - 1,
                              hash_idx_bits=self.hash.block_width - 1)


@dataclass
class AmplifiedState:
    psi: StateVector
    theta: float
    t: int
    final: StateVector


@dataclass(frozen=True)
class SearchOutcome:
    measured_index: int
    hash_block_zero: bool
    verified: bool
    status: Status


def _checked(state: StateVector, stage: str) -> StateVector:
    if abs(state.norm() - 1.0) > NORM_TOL:
        raise RuntimeError(f"norm drifted to {state.norm()!r} after {stage}")
    return state


def build_dictionary_state(V: Sequence[Word], hash_fn: QuantumHash,
                           layout: RegisterLayout) -> StateVector:
    n = len(V)
    if n != layout.n:
        raise ValueError(f"dictionary has {n} words, layout expects {layout.n}")
    qstate.check_budget(layout.q)
    start = qstate.uniform_index_and_flag(qstate.zero_state(layout), layout)
    return _checked(hash_fn.prepare_blocks(start, layout, list(V)), "dictionary preparation")


def apply_conversion(state: StateVector, w: Word, hash_fn: QuantumHash,
                     layout: RegisterLayout) -> StateVector:
    """Undo the hash of the query word inside every index block."""
    return _checked(hash_fn.apply_inverse(state, w, layout), "conversion")


def good_probability(state: StateVector, layout: RegisterLayout) -> float:
    return qstate.probability_of(state, GoodMask(layout))


def iteration_cap(n: int) -> int:
    return math.ceil(math.pi / 4 * math.sqrt(n) * 2)


def exact_iterations(p_good: float) -> int:
    theta = math.asin(math.sqrt(min(p_good, 1.0)))
    # round(pi/(4 theta) - 1/2) with ties rounded up
    return max(0, math.floor(math.pi / (4 * theta)))


def blind_iterations(n: int) -> int:
    return math.floor(math.pi / 4 * math.sqrt(n))


def choose_iterations(p_good: float, policy: IterationPolicy, n: int) -> int:
    cap = iteration_cap(n)
    if policy.kind == "fixed":
        if policy.t > cap:
            raise ValueError(f"fixed t={policy.t} exceeds the cap {cap} for n={n}")
        return policy.t
    if policy.kind == "blind":
        return min(blind_iterations(n), cap)
    if p_good <= 0.0:
        raise AmplificationUndefined("query absent and code orthogonal; amplification undefined")
    if p_good > 1.0 + 1e-10:
        raise ValueError(f"p_good={p_good} exceeds 1")
    return min(exact_iterations(p_good), cap)


def grover_iterate(state: StateVector, axis: StateVector, mask: GoodMask, t: int) -> AmplifiedState:
    """t macro steps, each a sign flip on ``mask`` then a reflection about ``axis``."""
    p_good = qstate.probability_of(axis, mask)
    theta = math.asin(math.sqrt(min(p_good, 1.0)))
    idx = mask.indices() if isinstance(mask, GoodMask) else mask
    current = state
    for _ in range(t):
        current = qstate.reflect_about(qstate.phase_flip(current, idx), axis)
    return AmplifiedState(psi=axis, theta=theta, t=t, final=_checked(current, "amplification"))


def decode_outcomes(basis: np.ndarray, layout: RegisterLayout, V: Sequence[str],
                    w: str) -> list[SearchOutcome]:
    fields = layout.decode(basis)
    outcomes = []
    for j, i, b in zip(fields["index"].tolist(), fields["hash_index"].tolist(),
                       fields["hash_target"].tolist()):
        zero = i == 0 and b == 0
        if not zero:
            outcomes.append(SearchOutcome(j, False, False, Status.HASH_NONZERO))
            continue
        verified = V[j] == w
        outcomes.append(SearchOutcome(j, True, verified,
                                      Status.FOUND if verified else Status.NOT_FOUND))
    return outcomes


def measure_and_decode(final: StateVector, layout: RegisterLayout, shots: int, seed: int,
                       V: Sequence[Word], w: Word) -> tuple[list[SearchOutcome], Counter]:
    """Measure every register (the constant flag is ignored) and verify each shot.

    The histogram counts (index, hash_index, hash_target) tuples.
    """
    m = len(as_bits(w))
    words = [bits_to_str(as_bits(v, m)) for v in V]
    draws = qstate.sample_basis(final, shots, seed)
    fields = layout.decode(draws)
    histogram = Counter(zip(fields["index"].tolist(), fields["hash_index"].tolist(),
                            fields["hash_target"].tolist()))
    return decode_outcomes(draws, layout, words, bits_to_str(as_bits(w))), histogram


def overall_status(tallies: dict[str, int], shots: int, pr_success: float,
                   p_hash_nonzero: float) -> Status:
    """Any verified hit wins; otherwise a hash-nonzero majority; else not found.

    With no shots the exact probabilities stand in for the tallies.
    """
    if shots == 0:
        if pr_success > 0.0:
            return Status.FOUND
        return Status.HASH_NONZERO if p_hash_nonzero > 0.5 else Status.NOT_FOUND
    if tallies.get(Status.FOUND.value, 0):
        return Status.FOUND
    if tallies.get(Status.HASH_NONZERO.value, 0) * 2 > shots:
        return Status.HASH_NONZERO
    return Status.NOT_FOUND


@dataclass
class PipelineStages:
    layout: RegisterLayout
    initial: StateVector
    dictionary: StateVector
    converted: StateVector
    amplified: AmplifiedState | None = None

    def as_dict(self) -> dict[str, StateVector]:
        out = {"initial": self.initial, "dictionary": self.dictionary,
               "converted": self.converted}
        if self.amplified is not None:
            out["final"] = self.amplified.final
        return out


def prepare_stages(instance: SearchInstance) -> PipelineStages:
    layout = instance.layout()
    qstate.check_budget(layout.q)
    initial = qstate.uniform_index_and_flag(qstate.zero_state(layout), layout)
    dictionary = build_dictionary_state(instance.V, instance.hash, layout)
    converted = apply_conversion(dictionary, instance.w, instance.hash, layout)
    return PipelineStages(layout, initial, dictionary, converted)


def run_stages(instance: SearchInstance, t: int) -> PipelineStages:
    stages = prepare_stages(instance)
    stages.amplified = grover_iterate(stages.converted, stages.converted,
                                      GoodMask(stages.layout), t)
    return stages


def run_search(instance: SearchInstance) -> tuple[RunReport, list[SearchOutcome]]:
    stages = prepare_stages(instance)
    layout = stages.layout
    n = instance.n
    hash_fn = instance.hash
    mask = GoodMask(layout)
    matches = [j for j, v in enumerate(instance.V) if v == instance.w]
    p_good = good_probability(stages.converted, layout)
    theta = math.asin(math.sqrt(min(p_good, 1.0)))
    t_exact = exact_iterations(p_good) if p_good > 0 else None

    message = None
    try:
        t = choose_iterations(p_good, instance.policy, n)
    except AmplificationUndefined as exc:
        t, message = 0, str(exc)
    stages.amplified = grover_iterate(stages.converted, stages.converted, mask, t)
    final = stages.amplified.final

    good_idx = mask.indices()
    pr_success = float(sum(final.amplitudes[good_idx[k]] ** 2 for k in matches))
    p_nonzero = 1.0 - good_probability(final, layout)
    a = math.sin((2 * t + 1) * theta) ** 2
    epsilon = hash_fn.spec.epsilon
    qubits, queries = resource_report(n, hash_fn.block_width - 1, t)

    d_profile = None
    if isinstance(hash_fn, FingerprintHash):
        table = hash_fn.codeword_table(list(instance.V))
        d_profile = (table ^ hash_fn.codeword_table([instance.w])).sum(axis=1).tolist()

    outcomes: list[SearchOutcome] = []
    histogram: dict[str, int] = {}
    tallies = {s.value: 0 for s in Status}
    shots = instance.shots if message is None else 0
    if shots:
        outcomes, _ = measure_and_decode(final, layout, shots, instance.seed,
                                         instance.V, instance.w)
        index_counts: Counter = Counter()
        for o in outcomes:
            tallies[o.status.value] += 1
            if o.hash_block_zero:
                index_counts[_unpad(o.measured_index, instance.n_input)] += 1
        histogram = {str(j): c for j, c in sorted(index_counts.items())}

    status = Status.NOT_FOUND if message else overall_status(tallies, shots, pr_success, p_nonzero)
    report = RunReport(
        n=n, m=hash_fn.spec.m, l=1 << (hash_fn.block_width - 1), s=hash_fn.block_width - 1,
        epsilon=epsilon, epsilon_exact=hash_fn.exact, d_profile=d_profile,
        matches=sorted({_unpad(k, instance.n_input) for k in matches}),
        p_good=p_good, theta=theta, t=t, t_exact=t_exact, t_blind=blind_iterations(n),
        a=a, pr_success_exact=pr_success,
        bound_lower=success_lower_bound(a, n, epsilon) if matches else None,
        effective_c=(n - 1) * epsilon ** 2, qubits=qubits, queries=queries,
        shots=shots, seed=int(instance.seed), policy=str(instance.policy),
        status=status.value, n_input=instance.n_input, histogram=histogram,
        tallies=tallies, classical_comparisons=sum(o.hash_block_zero for o in outcomes),
        message=message,
    )
    report.checks["success_bound"] = asdict(theorem2_check(report))
    return report, outcomes


def _unpad(j: int, n_input: int) -> int:
    return j if j < n_input else 0


def pad_dictionary(V: Sequence[str]) -> tuple[list[str], int]:
    """Repeat V[0] up to the next power of two."""
    n = len(V)
    if n == 0:
        raise ValueError("empty dictionary")
    size = 1 << (n - 1).bit_length()
    return list(V) + [V[0]] * (size - n), n


def read_dictionary(path: str | Path) -> list[str]:
    words = []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            words.append(bits_to_str(as_bits(line)))
            if len(words) > MAX_DICT_LINES:
                raise ValueError(f"dictionary exceeds {MAX_DICT_LINES} lines")
    if not words:
        raise ValueError(f"dictionary {path} is empty")
    if len({len(w) for w in words}) != 1:
        raise ValueError("dictionary words have differing lengths")
    return words


def write_dictionary(words: Sequence[str], path: str | Path) -> None:
    Path(path).write_text("".join(w + "\n" for w in words), encoding="ascii")
