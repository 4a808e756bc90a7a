import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import gf2_encode, hamming, orthogonal_instance
from qfh.analytics import (
    classical_search,
    dense_pipeline,
    dense_stages,
    lemma1_table,
    resource_report,
    theorem2_check,
    theorem3_check,
    min_qubit_verdict,
)
from qfh.gf2code import LinearCode, generate_random_linear_code, min_distance_exact
from qfh.qhash import FingerprintHash
from qfh.qstate import GoodMask
from qfh.report import query_cap, qubit_cap
from qfh.search import IterationPolicy, SearchInstance, run_search, run_stages


def random_words(rng, n, m):
    return ["".join(map(str, row)) for row in rng.integers(0, 2, (n, m))]


def test_classical_search():
    assert classical_search(["01", "10"], "11") == []
    assert classical_search(["011", "100", "011"], "011") == [0, 2]
    with pytest.raises(ValueError):
        classical_search(["01", "100"], "01")


def test_classical_agrees_with_verified_shots():
    rng = np.random.default_rng(3)
    V = random_words(rng, 64, 6)
    V[40] = V[17]
    h = FingerprintHash(generate_random_linear_code(6, 5, 3))
    report, outcomes = run_search(SearchInstance(V=V, w=V[17], hash=h, shots=20_000, seed=8))
    truth = classical_search(V, V[17])
    assert len(truth) >= 2 and report.matches == truth
    found = [o.measured_index for o in outcomes if o.verified]
    assert set(found) <= set(truth)
    total = len(found)
    for j in truth:
        count = found.count(j)
        p = 1 / len(truth)
        assert abs(count - total * p) <= 3 * math.sqrt(total * p * (1 - p))


# -- dense oracle -------------------------------------------------------------

def _assert_stages_match(inst, t):
    dense = dense_stages(inst, t)
    structured = run_stages(inst, t).as_dict()
    assert set(dense.stages) == set(structured)
    for name, sv in structured.items():
        assert np.max(np.abs(sv.amplitudes - dense.stages[name].amplitudes)) <= 1e-10, name
    assert dense.imag_residue <= 1e-12


def test_dense_small_fixture():
    code = generate_random_linear_code(2, 2, 42)
    inst = SearchInstance(V=["01", "11"], w="11", hash=FingerprintHash(code))
    for t in range(3):
        _assert_stages_match(inst, t)


def test_dense_t0_is_converted_state(hash42):
    inst = SearchInstance(V=["0000", "0011", "0101", "1111"], w="0011", hash=hash42)
    dense = dense_stages(inst, 0)
    assert np.array_equal(dense.stages["final"].amplitudes, dense.stages["converted"].amplitudes)


def test_dense_orthogonal_n4_reaches_one():
    V, w, h = orthogonal_instance(4, k=1)
    inst = SearchInstance(V=V, w=w, hash=h)
    final = dense_pipeline(inst)
    idx = GoodMask(inst.layout()).indices()
    assert float(np.sum(final.amplitudes[idx] ** 2)) == pytest.approx(1.0, abs=1e-9)


def test_dense_random_instances():
    rng = np.random.default_rng(0)
    for _ in range(6):
        idx_bits, s = int(rng.integers(0, 4)), int(rng.integers(1, 5))
        m = int(rng.integers(1, 6))
        V = random_words(rng, 1 << idx_bits, m)
        inst = SearchInstance(V=V, w=V[0], hash=FingerprintHash(
            generate_random_linear_code(m, s, int(rng.integers(1 << 30)))))
        _assert_stages_match(inst, int(rng.integers(0, 4)))


def test_dense_refuses_large_instances(hash42):
    V = ["0000"] * 128
    with pytest.raises(ValueError):
        dense_pipeline(SearchInstance(V=V, w="0000", hash=hash42), 0)


# -- conversion table ---------------------------------------------------------

def test_conversion_table_table_fixture(hash42, code42):
    V = ["0000", "0011", "0101", "1111", "0101", "1000", "0110", "1110"]
    rows = lemma1_table(V, "0101", hash42)
    d_min = min_distance_exact(code42).d_min
    cw = gf2_encode(code42.generator, "0101")
    for row, v in zip(rows, V):
        d = hamming(gf2_encode(code42.generator, v), cw)
        assert row.d == d
        if row.match:
            assert row.alpha0 == 1.0 and d == 0
        else:
            assert row.alpha0 == pytest.approx(1 - d / 16, abs=1e-12)
            assert abs(row.alpha0) <= 1 - d_min / 16 + 1e-12
    assert [r.j for r in rows if r.match] == [2, 4]


def test_conversion_table_full_distance_row():
    V, w, h = orthogonal_instance(2, k=0)
    rows = lemma1_table(V, w, h)
    assert rows[0].alpha0 == 1.0 and rows[1].alpha0 == 0.0 and rows[1].d == 4


# -- bound checks -------------------------------------------------------------

def test_success_bound_orthogonal_reduces_to_a():
    V, w, h = orthogonal_instance(16, k=5)
    report, _ = run_search(SearchInstance(V=V, w=w, hash=h))
    assert report.epsilon == 0.0 and report.bound_lower == report.a
    verdict = theorem2_check(report)
    assert verdict.passed and verdict.bound_ok and verdict.informative


def test_success_bound_n64_fixture():
    rng = np.random.default_rng(64)
    V = random_words(rng, 64, 12)
    h = FingerprintHash(generate_random_linear_code(12, 6, 64))
    report, _ = run_search(SearchInstance(V=V, w=V[17], hash=h))
    verdict = theorem2_check(report)
    assert verdict.bound_ok and verdict.queries_ok and verdict.qubits_ok and verdict.passed


def test_success_bound_degenerate_code_is_flagged():
    gen = np.ones((8, 3), dtype=np.uint8)
    gen[:, 2] = 0
    h = FingerprintHash(LinearCode(m=3, l=8, generator=gen))
    report, _ = run_search(SearchInstance(V=["000", "001", "110", "011"], w="110", hash=h))
    verdict = theorem2_check(report)
    assert report.epsilon == 1.0
    assert report.bound_lower == pytest.approx(report.a / 4)
    assert not verdict.informative and verdict.passed
    assert any("degenerate" in note for note in verdict.notes)


def test_success_bound_detects_failures(hash42):
    report, _ = run_search(SearchInstance(V=["0000", "0011", "0101", "1111"], w="0101", hash=hash42))
    assert theorem2_check(report).passed
    assert not theorem2_check(replace(report, pr_success_exact=report.bound_lower - 1e-6)).passed
    assert not theorem2_check(replace(report, queries=query_cap(4) + 1)).passed
    assert not theorem2_check(replace(report, qubits=100)).passed
    sampled = replace(report, epsilon_exact=False, pr_success_exact=0.0)
    verdict = theorem2_check(sampled)
    assert verdict.passed and verdict.bound_ok is False
    assert any("advisory" in note for note in verdict.notes)


def test_success_bound_miss_skips_bound(hash42):
    report, _ = run_search(SearchInstance(V=["0000", "0011", "0101", "1111"], w="1000", hash=hash42))
    verdict = theorem2_check(report)
    assert report.matches == [] and verdict.bound is None and verdict.passed


def test_success_bound_randomized_instances():
    rng = np.random.default_rng(2024)
    passed = 0
    for _ in range(100):
        n = 1 << int(rng.integers(2, 9))
        m = int(rng.integers(4, 17))
        s = math.ceil(math.log2(4 * m))
        V = random_words(rng, n, m)
        w = V[int(rng.integers(n))]
        h = FingerprintHash(generate_random_linear_code(m, s, int(rng.integers(1 << 62))))
        report, _ = run_search(SearchInstance(V=V, w=w, hash=h))
        assert report.epsilon_exact
        passed += theorem2_check(report).passed
    assert passed == 100


def test_min_qubit_cases():
    eps64 = 0.25
    assert min_qubit_verdict(64, eps64, 8).passed
    assert min_qubit_verdict(2, 0.0, 1).passed
    assert min_qubit_verdict(2, 0.0, 1).bound < 1
    bad = min_qubit_verdict(1 << 20, 0.1, 2)
    assert not bad.passed and bad.bound > 18
    assert not min_qubit_verdict(1 << 16, 0.01, 2).passed
    skipped = min_qubit_verdict(8, 1.0, 3)
    assert skipped.skipped and skipped.passed


def test_min_qubit_on_fingerprints(hash42):
    assert theorem3_check(hash42).passed
    for m, s, seed in [(8, 5, 1), (16, 6, 2), (24, 7, 3)]:
        h = FingerprintHash(generate_random_linear_code(m, s, seed))
        assert theorem3_check(h).passed
        assert h.exact == (m <= 20)


def test_resource_report():
    assert resource_report(1024, 8, 3) == (20, 3)
    assert resource_report(1, 1, 0) == (3, 0)
    V, w, h = orthogonal_instance(64)
    report, _ = run_search(SearchInstance(V=V, w=w, hash=h, policy=IterationPolicy("blind")))
    assert report.queries == 6 and report.qubits == 6 + 2 + 2
    with pytest.raises(ValueError):
        resource_report(12, 3, 1)
    assert qubit_cap(1024, 16) == 2 * 10 + 4 + 8
