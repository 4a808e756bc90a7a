"""Run reports, resource accounting and the bound checkers."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

from .qhash import QuantumHash, min_qubits_bound

SCHEMA_VERSION = 1
BOUND_TOL = 1e-9
# stands in for the unspecified additive constant of the qubit bound
QUBIT_CONST = 8

CSV_COLUMNS = ("n", "m", "l", "s", "epsilon", "t", "p_good", "a", "pr_exact", "bound", "pass")


def resource_report(n: int, s: int, t: int) -> tuple[int, int]:
    """(qubits, queries): log2(n) + s + 2 qubits, one query per macro step."""
    if n < 1 or n & (n - 1):
        raise ValueError(f"n={n} must be a power of two")
    return (n.bit_length() - 1) + s + 2, t


def query_cap(n: int) -> int:
    return math.ceil(math.pi / 4 * math.sqrt(n)) + 1


def qubit_cap(n: int, m: int) -> float:
    return 2 * math.log2(n) + math.log2(m) + QUBIT_CONST


@dataclass
class RunReport:
    n: int
    m: int
    l: int
    s: int
    epsilon: float
    epsilon_exact: bool
    d_profile: list[int] | None
    matches: list[int]
    p_good: float
    theta: float
    t: int
    t_exact: int | None
    t_blind: int
    a: float
    pr_success_exact: float
    bound_lower: float | None
    effective_c: float
    qubits: int
    queries: int
    shots: int
    seed: int
    policy: str
    status: str = "NotFound"
    n_input: int | None = None
    histogram: dict[str, int] = field(default_factory=dict)
    tallies: dict[str, int] = field(default_factory=dict)
    classical_comparisons: int = 0
    message: str | None = None
    checks: dict[str, Any] = field(default_factory=dict)
    schema: int = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def csv_row(self) -> dict[str, Any]:
        verdict = self.checks.get("success_bound", {})
        return {
            "n": self.n, "m": self.m, "l": self.l, "s": self.s,
            "epsilon": self.epsilon, "t": self.t, "p_good": self.p_good, "a": self.a,
            "pr_exact": self.pr_success_exact,
            "bound": self.bound_lower if self.bound_lower is not None else "",
            "pass": verdict.get("passed", False),
        }


def success_lower_bound(a: float, n: int, epsilon: float) -> float:
    return a / (1.0 + (n - 1) * epsilon ** 2)


@dataclass
class SuccessBoundVerdict:
    passed: bool
    bound_ok: bool | None
    queries_ok: bool
    qubits_ok: bool
    bound: float | None
    informative: bool
    notes: list[str] = field(default_factory=list)


def theorem2_check(report: RunReport) -> SuccessBoundVerdict:
    """Success-probability, query and qubit clauses of the search guarantee.

    A bound computed from a sampled epsilon is advisory only: sampling can
    undershoot epsilon, making the bound too strong.
    """
    notes = []
    queries_ok = report.queries <= query_cap(report.n)
    qubits_ok = report.qubits <= qubit_cap(report.n, report.m)
    bound = None
    bound_ok = None
    informative = report.epsilon < 1.0
    if not report.matches:
        notes.append("query absent from dictionary; success bound not defined")
    else:
        bound = success_lower_bound(report.a, report.n, report.epsilon)
        bound_ok = report.pr_success_exact >= bound - BOUND_TOL
        if not informative:
            notes.append("degenerate code (epsilon = 1); bound reduces to a/n")
        if not report.epsilon_exact:
            notes.append("epsilon is a sampled estimate; bound clause is advisory")
            if not bound_ok:
                notes.append("advisory bound clause failed")
    hard = [queries_ok, qubits_ok]
    if bound_ok is not None and report.epsilon_exact:
        hard.append(bound_ok)
    return SuccessBoundVerdict(
        passed=all(hard), bound_ok=bound_ok, queries_ok=queries_ok, qubits_ok=qubits_ok,
        bound=bound, informative=informative, notes=notes,
    )


@dataclass
class MinQubitVerdict:
    passed: bool
    bound: float | None
    width: int
    skipped: bool = False
    note: str | None = None


def min_qubit_verdict(m: int, epsilon: float, width: int) -> MinQubitVerdict:
    """Compare a hash output width against the minimum-qubit bound."""
    if epsilon >= 1.0:
        return MinQubitVerdict(True, None, width, skipped=True,
                               note="epsilon = 1: hash is not stable, bound not applicable")
    if m < 2:
        return MinQubitVerdict(True, None, width, skipped=True, note="bound needs m >= 2")
    bound = min_qubits_bound(m, epsilon)
    return MinQubitVerdict(width >= bound, bound, width)


def theorem3_check(hash_fn: QuantumHash) -> MinQubitVerdict:
    """Checks the hash's full block width (s + 1 for fingerprints).

    The bound decreases in epsilon, so a sampled epsilon (which can only
    undershoot) makes the check stricter, never looser.
    """
    return min_qubit_verdict(hash_fn.spec.m, hash_fn.spec.epsilon, hash_fn.block_width)
