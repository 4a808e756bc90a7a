"""Command-line front end: ``qfh <command> [options]``.

All randomness derives from ``--seed``: code generation uses seed^1,
dictionary generation seed^2 and measurement sampling seed^3.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import gf2code
from .analytics import lemma1_table, min_qubit_verdict
from .qhash import FingerprintHash
from .qstate import MAX_QUBITS
from .report import CSV_COLUMNS
from .search import (
    IterationPolicy,
    SearchInstance,
    Status,
    blind_iterations,
    exact_iterations,
    good_probability,
    pad_dictionary,
    prepare_stages,
    read_dictionary,
    run_search,
    write_dictionary,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3
EXIT_HASH_NONZERO = 4

STATUS_EXIT = {
    Status.FOUND.value: EXIT_OK,
    Status.NOT_FOUND.value: EXIT_NOT_FOUND,
    Status.HASH_NONZERO.value: EXIT_HASH_NONZERO,
}

CODE_SEED_SALT, DICT_SEED_SALT, SAMPLE_SEED_SALT = 1, 2, 3
MAX_DICT_N = 1 << 20
MAX_DICT_M = 64
SAMPLED_DISTANCE_TRIALS = 100_000

REPORT_JSON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "schema", "n", "m", "l", "s", "epsilon", "epsilon_exact", "p_good", "theta", "t",
        "a", "pr_success_exact", "bound_lower", "qubits", "queries", "shots", "seed",
        "policy", "status", "histogram", "tallies", "checks",
    ],
    "properties": {
        "schema": {"const": 1},
        "n": {"type": "integer", "minimum": 1},
        "n_input": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 1},
        "l": {"type": "integer", "minimum": 2},
        "s": {"type": "integer", "minimum": 1},
        "epsilon": {"type": "number", "minimum": 0, "maximum": 1},
        "epsilon_exact": {"type": "boolean"},
        "d_profile": {"type": ["array", "null"], "items": {"type": "integer"}},
        "matches": {"type": "array", "items": {"type": "integer"}},
        "p_good": {"type": "number", "minimum": 0},
        "theta": {"type": "number"},
        "t": {"type": "integer", "minimum": 0},
        "t_exact": {"type": ["integer", "null"]},
        "t_blind": {"type": "integer"},
        "a": {"type": "number"},
        "pr_success_exact": {"type": "number", "minimum": 0},
        "bound_lower": {"type": ["number", "null"]},
        "effective_c": {"type": "number"},
        "qubits": {"type": "integer"},
        "queries": {"type": "integer"},
        "shots": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "policy": {"type": "string", "pattern": "^(exact|blind|fixed:[0-9]+)$"},
        "status": {"enum": ["Found", "NotFound", "HashNonzero"]},
        "histogram": {"type": "object", "additionalProperties": {"type": "integer"}},
        "tallies": {
            "type": "object",
            "properties": {k: {"type": "integer"} for k in ("Found", "NotFound", "HashNonzero")},
        },
        "classical_comparisons": {"type": "integer"},
        "message": {"type": ["string", "null"]},
        "checks": {
            "type": "object",
            "properties": {
                "success_bound": {
                    "type": "object",
                    "required": ["passed", "bound_ok", "queries_ok", "qubits_ok"],
                },
            },
        },
    },
}


class UsageError(Exception):
    pass


def _threads() -> int:
    value = int(os.environ.get("QFH_THREADS", "0") or 0)
    return value if value > 0 else (os.cpu_count() or 1)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_word(args, m: int) -> str:
    if args.word is not None:
        word = args.word.strip()
    elif args.word_file:
        word = Path(args.word_file).read_text(encoding="ascii").strip()
    else:
        raise UsageError("give the query with --word or --word-file")
    if len(word) != m:
        raise UsageError(f"query word has length {len(word)}, dictionary words have {m}")
    return gf2code.bits_to_str(gf2code.as_bits(word))


def _make_hash(code: gf2code.LinearCode, seed: int) -> FingerprintHash:
    metrics = gf2code.code_metrics(code, SAMPLED_DISTANCE_TRIALS, seed)
    return FingerprintHash(code, metrics)


def _load_instance(args) -> SearchInstance:
    words = read_dictionary(args.dict)
    m = len(words[0])
    if args.code:
        code = gf2code.load_code(args.code)
        if code.m != m:
            raise UsageError(f"code has m={code.m}, dictionary words have length {m}")
    else:
        code = gf2code.generate_random_linear_code(m, gf2code.hash_exponent(m, args.c),
                                                   args.seed ^ CODE_SEED_SALT)
    word = _load_word(args, m)
    n_input = len(words)
    if n_input & (n_input - 1):
        if not args.pad:
            raise UsageError(f"dictionary size {n_input} is not a power of two; use --pad")
        words, n_input = pad_dictionary(words)
    q = (len(words).bit_length() - 1) + code.s + 2
    if q > MAX_QUBITS:
        raise UsageError(f"instance needs {q} qubits, budget is {MAX_QUBITS}")
    policy = IterationPolicy.parse(args.policy)
    return SearchInstance(V=words, w=word, hash=_make_hash(code, args.seed), policy=policy,
                          seed=args.seed ^ SAMPLE_SEED_SALT, shots=args.shots, n_input=n_input)


def cmd_gen_dict(args) -> int:
    if not 1 <= args.n <= MAX_DICT_N or not 1 <= args.m <= MAX_DICT_M:
        raise UsageError(f"need 1 <= n <= {MAX_DICT_N} and 1 <= m <= {MAX_DICT_M}")
    rng = np.random.default_rng(args.seed ^ DICT_SEED_SALT)
    bits = rng.integers(0, 2, size=(args.n, args.m), dtype=np.uint8)
    words = [gf2code.bits_to_str(row) for row in bits]
    if args.out:
        write_dictionary(words, args.out)
    else:
        sys.stdout.write("".join(w + "\n" for w in words))
    return EXIT_OK


def cmd_gen_code(args) -> int:
    s = gf2code.hash_exponent(args.m, args.c)
    code = gf2code.generate_random_linear_code(args.m, s, args.seed ^ CODE_SEED_SALT)
    metrics = gf2code.code_metrics(code, SAMPLED_DISTANCE_TRIALS, args.seed)
    if args.out:
        gf2code.save_code(code, args.out)
    else:
        sys.stdout.write(gf2code.format_code(code))
    info = {"m": code.m, "l": code.l, "s": s, "d_min": metrics.d_min,
            "epsilon": metrics.epsilon, "exact": metrics.exact}
    stream = sys.stdout if args.out else sys.stderr
    if args.json:
        stream.write(json.dumps(info, sort_keys=True) + "\n")
    else:
        flag = "" if metrics.exact else " (sampled estimate)"
        stream.write(f"l={code.l} s={s} d_min={metrics.d_min} epsilon={metrics.epsilon:.6f}{flag}\n")
        if metrics.degenerate:
            stream.write("warning: degenerate code (d_min = 0)\n")
    return EXIT_OK


def cmd_search(args) -> int:
    instance = _load_instance(args)
    report, _ = run_search(instance)
    if args.json:
        _emit(json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n", args.out)
    else:
        lines = [
            f"status: {report.status}",
            f"n={report.n} m={report.m} l={report.l} epsilon={report.epsilon:.6f}"
            + ("" if report.epsilon_exact else " (sampled)"),
            f"p_good={report.p_good:.6g} theta={report.theta:.6g} t={report.t} "
            f"(policy {report.policy}, exact {report.t_exact}, blind {report.t_blind})",
            f"Pr_success={report.pr_success_exact:.6g} bound={report.bound_lower}",
            f"qubits={report.qubits} queries={report.queries}",
        ]
        if report.shots:
            lines.append(f"shots={report.shots} tallies={report.tallies}")
            found = {j: c for j, c in report.histogram.items() if int(j) in report.matches}
            if found:
                lines.append(f"verified indices: {found}")
        if report.n_input != report.n:
            lines.append(f"padded {report.n_input} -> {report.n} words (probability diluted)")
        if report.message:
            lines.append(report.message)
        _emit("\n".join(lines) + "\n", args.out)
    if report.message:
        sys.stderr.write(report.message + "\n")
    return STATUS_EXIT[report.status]


def analyze_instance(instance: SearchInstance) -> dict:
    stages = prepare_stages(instance)
    p_good = good_probability(stages.converted, stages.layout)
    rows = lemma1_table(instance.V, instance.w, instance.hash)
    matches = [r.j for r in rows if r.match]
    theta = math.asin(math.sqrt(min(p_good, 1.0)))
    t_exact = exact_iterations(p_good) if p_good > 0 else None
    predicted = None
    if t_exact is not None:
        a = math.sin((2 * t_exact + 1) * theta) ** 2
        predicted = a * len(matches) / (p_good * instance.n)
    return {
        "rows": [{"j": r.j, "d": r.d, "alpha0": r.alpha0, "match": r.match} for r in rows],
        "p_good": p_good, "theta": theta, "t_exact": t_exact,
        "t_blind": blind_iterations(instance.n), "predicted_pr_success": predicted,
        "epsilon": instance.hash.spec.epsilon,
    }


def cmd_analyze(args) -> int:
    result = analyze_instance(_load_instance(args))
    if args.json:
        _emit(json.dumps(result, sort_keys=True, indent=2) + "\n", args.out)
        return EXIT_OK
    buf = io.StringIO()
    buf.write(f"{'j':>6} {'d_j':>5} {'alpha0':>12}\n")
    for r in result["rows"]:
        buf.write(f"{r['j']:>6} {r['d']:>5} {r['alpha0']:>12.8f}{'  <- match' if r['match'] else ''}\n")
    buf.write(f"p_good={result['p_good']:.8g} theta={result['theta']:.8g}\n")
    buf.write(f"t_exact={result['t_exact']} t_blind={result['t_blind']}\n")
    buf.write(f"predicted Pr_success={result['predicted_pr_success']}\n")
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _run_seed(master: int, index: int) -> int:
    seq = np.random.SeedSequence([master & ((1 << 64) - 1), index])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def sweep_row(n: int, m: int, c: float, run_seed: int) -> dict:
    """One planted-query instance, exact metrics, exact iteration policy."""
    code = gf2code.generate_random_linear_code(m, gf2code.hash_exponent(m, c),
                                               run_seed ^ CODE_SEED_SALT)
    rng = np.random.default_rng(run_seed ^ DICT_SEED_SALT)
    bits = rng.integers(0, 2, size=(n, m), dtype=np.uint8)
    words = [gf2code.bits_to_str(row) for row in bits]
    target = words[int(rng.integers(0, n))]
    instance = SearchInstance(V=words, w=target, hash=FingerprintHash(code),
                              policy=IterationPolicy("exact"), seed=run_seed ^ SAMPLE_SEED_SALT)
    report, _ = run_search(instance)
    return report.csv_row()


def run_sweep(n_list: list[int], m: int, trials: int, seed: int, c: float = 4.0,
              workers: int | None = None) -> list[dict]:
    sizes = [n for n in n_list for _ in range(trials)]
    jobs = [(n, _run_seed(seed, idx)) for idx, n in enumerate(sizes)]

    def work(job):
        n, rs = job
        try:
            row = sweep_row(n, m, c, rs)
            row["error"] = ""
        except Exception as exc:  # recorded per row, reported via exit code
            row = {col: "" for col in CSV_COLUMNS}
            row.update(n=n, m=m, error=f"{type(exc).__name__}: {exc}")
            row["pass"] = False
        return row

    with ThreadPoolExecutor(max_workers=workers or _threads()) as pool:
        return list(pool.map(work, jobs))


def cmd_sweep(args) -> int:
    try:
        n_list = [int(x) for x in args.n_list.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --n-list {args.n_list!r}") from None
    for n in n_list:
        if n < 1 or n & (n - 1):
            raise UsageError(f"n={n} is not a power of two")
        q = (n.bit_length() - 1) + gf2code.hash_exponent(args.m, args.c) + 2
        if q > MAX_QUBITS:
            raise UsageError(f"n={n}, m={args.m} needs {q} qubits, budget is {MAX_QUBITS}")
    rows = run_sweep(n_list, args.m, args.trials, args.seed, args.c)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(CSV_COLUMNS) + ["error"], lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _emit(buf.getvalue(), args.out)
    passed = sum(1 for r in rows if r["pass"] is True)
    errors = sum(1 for r in rows if r["error"])
    rate = f"{100.0 * passed / len(rows):.1f}%" if rows else "n/a"
    summary = f"pass rate: {passed}/{len(rows)} ({rate})"
    if errors:
        summary += f", {errors} errors"
    (sys.stdout if args.out else sys.stderr).write(summary + "\n")
    return EXIT_FAIL if errors else EXIT_OK


def cmd_verify_bounds(args) -> int:
    if not 0.0 <= args.epsilon < 1.0:
        raise UsageError("epsilon must lie in [0, 1)")
    if args.m < 2:
        raise UsageError("m must be >= 2")
    verdict = min_qubit_verdict(args.m, args.epsilon, args.s)
    sys.stdout.write(f"bound={verdict.bound:.6f} s={args.s} {'PASS' if verdict.passed else 'FAIL'}\n")
    return EXIT_OK if verdict.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfh", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-dict", help="write n random m-bit words")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_dict)

    p = sub.add_parser("gen-code", help="write a random linear code and print its metrics")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--c", type=float, default=4.0, help="target rate l/m (default 4)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_gen_code)

    for name, func, helptext in (("search", cmd_search, "run the quantum search"),
                                 ("analyze", cmd_analyze, "print the conversion table")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--dict", required=True)
        p.add_argument("--code", help="code file; generated from --seed and --c when omitted")
        p.add_argument("--word")
        p.add_argument("--word-file")
        p.add_argument("--c", type=float, default=4.0)
        p.add_argument("--policy", default="exact", help="exact | blind | fixed:<t>")
        p.add_argument("--shots", type=int, default=100 if name == "search" else 0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--pad", action="store_true")
        p.add_argument("--json", action="store_true")
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("sweep", help="bound checks over random planted instances")
    p.add_argument("--n-list", default="4,16,64,256")
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--c", type=float, default=4.0)
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify-bounds", help="minimum-qubit bound for a hash of s qubits")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--s", type=int, required=True)
    p.set_defaults(func=cmd_verify_bounds)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", 0) < 0:
        parser.error("--seed must be non-negative")
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        sys.stderr.write(f"qfh {args.command}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
