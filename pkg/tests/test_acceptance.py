"""Acceptance checks, one per criterion, each printing a single PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) for the eight lines alone;
under pytest the lines are repeated in the terminal summary.
"""

from __future__ import annotations

import math
import time

import numpy as np

from dqcomm.bounds import f2_submatrix_property, protocol_prob_matrix, qft_prob_matrix, rank_experiment, sample_hard_matrix
from dqcomm.certificate import no_ancilla_budget
from dqcomm.cli import main as cli_main
from dqcomm.cnot import (
    CliffordLayers,
    DagCnotSpec,
    clifford_distribute,
    clifford_matrix,
    cnot_distribute,
    cnot_distribute_topology,
    dag_cnot_distribute,
)
from dqcomm.general import synth
from dqcomm.gf2 import F2Matrix, f2_random_invertible
from dqcomm.linalg import random_unitary
from dqcomm.qft import QftSpec, aqft_distribute_2, qft_distribute_2, qft_distribute_k, qft_matrix
from dqcomm.serialize import circuits_equal, deserialize, serialize
from dqcomm.simulate import simulate_bits, verify_implements
from dqcomm.topology import Topology, check_adjacency

RESULTS: dict[int, str] = {}


def report(num: int, ok: bool, detail: str, started: float) -> bool:
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - started:.1f}s) {detail}"
    RESULTS[num] = line
    print(line, flush=True)
    return ok


# 1 and 2 share the synthesis runs


_RUNS: list[tuple[int, int, int, int, float, float]] = []


def _general_runs():
    if not _RUNS:
        for n in range(2, 7):
            for k in (2, 3):
                for m in (0, 1, 2):
                    for s in range(20):
                        u = random_unitary(2**n, 100000 * n + 1000 * k + 100 * m + s)
                        c, cert = synth(u, k, m)
                        rep = verify_implements(c, u, 1e-8)
                        _RUNS.append((n, k, m, cert.measured, rep.spectral_error, rep.ancilla_leakage))
    return _RUNS


def check_general_correctness() -> bool:
    t = time.perf_counter()
    runs = _general_runs()
    err = max(r[4] for r in runs)
    leak = max(r[5] for r in runs)
    ok = err <= 1e-8 and leak <= 1e-9 and len(runs) == 600
    return report(1, ok, f"{len(runs)} runs, max spectral error {err:.2e} <= 1e-8, max leakage {leak:.2e} <= 1e-9", t)


def check_general_counts() -> bool:
    t = time.perf_counter()
    runs = _general_runs()
    over = [r for r in runs if r[3] > no_ancilla_budget(r[0], r[1])]
    counts = {}
    for n in (6, 8, 10):
        c, cert = synth(random_unitary(2**n, n), 2, 0)
        counts[n] = cert.measured
    slopes = [math.log2(counts[b] / counts[a]) for a, b in ((6, 8), (8, 10))]
    ok = not over and all(1.5 <= s <= 2.5 for s in slopes)
    detail = (
        f"{len(runs) - len(over)}/{len(runs)} within no-ancilla budget; "
        f"k=2 m=0 counts {counts}, log2 slope per step of 2 qubits {[round(s, 3) for s in slopes]} in 2.0 +- 0.5"
    )
    return report(2, ok, detail, t)


def check_qft_exact() -> bool:
    t = time.perf_counter()
    counts_ok = all(qft_distribute_2(n)[1].measured <= n for n in range(1, 17))
    err = 0.0
    for n in range(1, 11):
        for rev in (False, True):
            c, _ = qft_distribute_2(n, bit_reversed=rev)
            err = max(err, verify_implements(c, qft_matrix(n, rev), 1e-9).spectral_error)
    topo = Topology.path(4)
    c, cert = qft_distribute_k(8, topo, m=1)
    check_adjacency(c, topo)
    err_k = verify_implements(c, qft_matrix(8), 1e-9).spectral_error
    ok = counts_ok and err <= 1e-9 and err_k <= 1e-9
    detail = (
        f"count <= n for n=1..16: {counts_ok}; two-party max error n<=10 {err:.2e}; "
        f"k=4 path n=8 error {err_k:.2e}, count {cert.measured}"
    )
    return report(3, ok, detail, t)


def check_aqft() -> bool:
    t = time.perf_counter()
    n = 10
    target = qft_matrix(n)
    parts, errs, ok = [], [], True
    for b in (4, 6, 8):
        c, cert = aqft_distribute_2(QftSpec(n, approx_b=b))
        err = verify_implements(c, target, 10.0).spectral_error
        bound = 2 * math.pi * n * 2.0**-b
        ok &= cert.measured <= 2 * b and err <= bound
        errs.append(err)
        parts.append(f"b={b}: count {cert.measured} <= {2 * b}, error {err:.3g} <= {bound:.3g}")
    mono = all(errs[i + 1] <= errs[i] for i in range(len(errs) - 1))
    return report(4, ok and mono, "; ".join(parts) + f"; monotone {mono}", t)


def _bits_equal(c, mat: F2Matrix, rng) -> bool:
    n = mat.nrows
    if n <= 16:
        xs = list(range(2**n))
    else:
        xs = [int(v) for v in rng.integers(0, 2, size=(10**4, n)) @ (1 << np.arange(n, dtype=object))]
    got = simulate_bits(c, xs)
    return all(int(g) == mat.apply(x) for g, x in zip(got, xs))


def _random_dag(n: int, rng) -> DagCnotSpec:
    low = np.tril(rng.integers(0, 2, size=(n, n)), -1) + np.eye(n, dtype=int)
    return DagCnotSpec.from_lower_triangular(F2Matrix.from_array(low))


def check_cnot_clifford() -> bool:
    t = time.perf_counter()
    rng = np.random.default_rng(5)
    ok = True
    notes = []
    for n in (8, 16, 32, 64):
        mat = f2_random_invertible(n, rng)
        c, cert = cnot_distribute(mat)
        g_ok = cert.measured <= 2 * n and _bits_equal(c, mat, rng)
        dag = _random_dag(n, rng)
        cd, certd = dag_cnot_distribute(dag)
        d_ok = certd.measured <= n / 2 and _bits_equal(cd, dag.matrix(), rng)
        layers = CliffordLayers.random(n, int(rng.integers(1 << 30)))
        cc, certc = clifford_distribute(layers)
        c_ok = certc.measured <= 10 * n
        if n <= 8:
            c_ok &= verify_implements(cc, clifford_matrix(layers), 1e-8).ok
        topo = Topology.path(4)
        ct, certt = cnot_distribute_topology(mat, topo)
        check_adjacency(ct, topo)
        t_ok = certt.measured <= 2 * n * 4 * topo.diameter() and _bits_equal(ct, mat, rng)
        ok &= g_ok and d_ok and c_ok and t_ok
        notes.append(
            f"n={n}: dag {certd.measured}<={n // 2} general {cert.measured}<={2 * n} "
            f"clifford {certc.measured}<={10 * n} path4 {certt.measured}<={2 * n * 4 * 3}"
        )
    return report(5, ok, "; ".join(notes), t)


def check_rank() -> bool:
    t = time.perf_counter()
    ranks, failing = {}, []
    match = 0.0
    for n in range(1, 8):
        w = rank_experiment(n, 1e-9, exact=n <= 6)
        ranks[n] = w.rank
        if not w.passes:
            failing.append(f"n={n} rank {w.rank} < {w.required}")
        match = max(match, float(np.max(np.abs(protocol_prob_matrix(n) - qft_prob_matrix(n)))))
    ok = not failing and match <= 1e-10
    detail = f"numeric ranks {ranks}; protocol match {match:.1e} <= 1e-10"
    if failing:
        detail += "; below 2^(n-1): " + ", ".join(failing)
    return report(6, ok, detail, t)


def check_random_matrix() -> bool:
    t = time.perf_counter()
    m, trial = sample_hard_matrix(8, 0.5, 100, 0)
    rep = f2_submatrix_property(m, 0.5)
    ident = f2_submatrix_property(F2Matrix.identity(8), 0.5)
    ok = rep.passed and trial <= 100 and not ident.passed
    detail = f"found at trial {trial} (min rank {rep.min_rank} >= {rep.threshold}); identity min rank {ident.min_rank}"
    return report(7, ok, detail, t)


def check_round_trip(tmp_dir) -> bool:
    import contextlib
    import io
    import os

    t = time.perf_counter()
    ok = True
    pairs = [
        synth(random_unitary(16, 3), 2, 1),
        qft_distribute_k(6, Topology.star(3)),
        clifford_distribute(CliffordLayers.random(6, 2)),
        cnot_distribute(f2_random_invertible(12, 4)),
    ]
    for c, cert in pairs:
        text = serialize(c, cert)
        back, cert2 = deserialize(text)
        again, _ = deserialize(serialize(back, cert2))
        ok &= cert2 == cert and serialize(back, cert2) == text and circuits_equal(again, back)
    flags = [
        ["synth", "general", "--n", "4", "--k", "2", "--m", "1", "--seed", "9"],
        ["synth", "qft", "--n", "9", "--approx-eps", "0.5"],
        ["bounds", "report"],
    ]
    for i, f in enumerate(flags):
        outs = []
        for rep in range(2):
            path = os.path.join(tmp_dir, f"out{i}_{rep}")
            with contextlib.redirect_stderr(io.StringIO()), contextlib.redirect_stdout(io.StringIO()):
                code = cli_main(f + ["--out", path])
            ok &= code == 0
            with open(path, "rb") as fh:
                outs.append(fh.read())
        ok &= outs[0] == outs[1]
    return report(8, ok, f"{len(pairs)} circuits round-trip; {len(flags)} CLI invocations byte-identical on rerun", t)


# pytest entry points


def test_criterion_1_general_correctness():
    assert check_general_correctness()


def test_criterion_2_general_counts():
    assert check_general_counts()


def test_criterion_3_qft_exact():
    assert check_qft_exact()


def test_criterion_4_aqft():
    assert check_aqft()


def test_criterion_5_cnot_clifford():
    assert check_cnot_clifford()


def test_criterion_6_rank():
    assert check_rank(), RESULTS[6]


def test_criterion_7_random_matrix():
    assert check_random_matrix()


def test_criterion_8_round_trip(tmp_path):
    assert check_round_trip(str(tmp_path))


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as d:
        checks = [
            check_general_correctness,
            check_general_counts,
            check_qft_exact,
            check_aqft,
            check_cnot_clifford,
            check_rank,
            check_random_matrix,
            lambda: check_round_trip(d),
        ]
        results = [chk() for chk in checks]
    raise SystemExit(0 if all(results) else 1)
