import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dqcomm.bounds import (
    DEFAULT_GRID,
    bound_report,
    exact_rank_lower_bound,
    f2_submatrix_property,
    implied_bounds,
    numeric_rank,
    partition_rank_experiment,
    protocol_prob_matrix,
    qft_prob_matrix,
    rank_experiment,
    report_csv,
    report_text,
    sample_hard_matrix,
    submatrix_threshold,
)
from dqcomm.errors import InvalidInput, InvalidTol, NotFound, TooLarge
from dqcomm.gf2 import F2Matrix, f2_random_invertible

from oracles import f2_rank_dense, plain_qft


def formula_entry(n, x, y):
    p = 1.0
    for i in range(1, n + 1):
        bit = (y >> (n - i)) & 1
        t = math.pi * x / 2 ** (2 * n - i)
        p *= math.sin(t) ** 2 if bit else math.cos(t) ** 2
    return p / 2**n


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_prob_matrix_matches_formula(n):
    m = qft_prob_matrix(n)
    for x in range(2**n):
        for y in range(2**n):
            assert m[x, y] == pytest.approx(formula_entry(n, x, y), abs=1e-15)
    assert np.allclose(m.sum(axis=1), 2.0**-n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_protocol_matches_dense_qft(n):
    # Alice's x on the low qubits of a 2n-qubit register; Bob reads output qubits 1..n after H
    nq = 2 * n
    f = plain_qft(nq)
    hn = np.ones((1, 1))
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    for q in range(nq):
        hn = np.kron(hn, h if 1 <= q <= n else np.eye(2))
    out = hn @ f
    want = np.zeros((2**n, 2**n))
    for x in range(2**n):
        probs = np.abs(out[:, x]) ** 2
        for idx, pr in enumerate(probs):
            y = (idx >> (n - 1)) & (2**n - 1)
            want[x, y] += pr / 2**n
    assert np.allclose(protocol_prob_matrix(n), want, atol=1e-12)
    assert np.allclose(protocol_prob_matrix(n), qft_prob_matrix(n), atol=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_rank_meets_requirement_small_n(n):
    w = rank_experiment(n)
    assert w.passes and w.rank >= 2 ** (n - 1)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_exact_rank_witness(n):
    assert exact_rank_lower_bound(n) >= 2 ** (n - 1)


def test_implied_bounds_and_tol_validation():
    q, g = implied_bounds(16)
    assert q == 2 and g == 1.0
    with pytest.raises(InvalidTol):
        numeric_rank(np.eye(2), 0)
    with pytest.raises(InvalidTol):
        numeric_rank(np.eye(2), 1.5)


def test_partition_rank_reported():
    out = partition_rank_experiment(4, seed=1)
    assert out["rank"] >= 1


def test_caps():
    with pytest.raises(TooLarge):
        qft_prob_matrix(13)
    with pytest.raises(TooLarge):
        protocol_prob_matrix(8)
    with pytest.raises(InvalidInput):
        qft_prob_matrix(0)


def brute_min_rank(a: np.ndarray) -> int:
    n = a.shape[0]
    best = n
    for rs in itertools.combinations(range(n), n // 2):
        for cs in itertools.combinations(range(n), n // 2):
            best = min(best, f2_rank_dense(a[np.ix_(rs, cs)]))
    return best


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([2, 4, 6]), st.integers(0, 10**6), st.floats(0, 1))
def test_submatrix_min_rank_matches_brute_force(n, seed, delta):
    m = f2_random_invertible(n, seed)
    rep = f2_submatrix_property(m, delta)
    assert rep.min_rank == brute_min_rank(m.to_array())
    assert rep.passed == (rep.min_rank >= submatrix_threshold(n, delta))


def test_identity_fails_and_sampler_finds_matrix():
    rep = f2_submatrix_property(F2Matrix.identity(8), 0.5)
    assert not rep.passed and rep.min_rank == 0
    m, trial = sample_hard_matrix(8, 0.5, 100, 0)
    assert 1 <= trial <= 100
    assert f2_submatrix_property(m, 0.5).passed
    assert m.is_invertible()


def test_sampler_not_found():
    with pytest.raises(NotFound):
        sample_hard_matrix(8, 0.0, 2, 0)


def test_sampled_mode_is_seeded():
    m = f2_random_invertible(16, 2)
    a = f2_submatrix_property(m, 0.5, mode="sampled", trials=50, seed=3)
    b = f2_submatrix_property(m, 0.5, mode="sampled", trials=50, seed=3)
    assert a == b and a.checked == 50


def test_report_rows_meet_bounds():
    rows = bound_report(DEFAULT_GRID[:3] + [{"family": "qft", "n": 8, "k": 2, "m": 1}])
    assert all(r.measured <= r.bound for r in rows)
    csv = report_csv(rows)
    assert csv.splitlines()[0].startswith("family,n,k,m,topology,measured,bound")
    assert len(report_text(rows).splitlines()) == len(rows) + 1
