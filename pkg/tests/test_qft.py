import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dqcomm.errors import InsufficientAncilla, InvalidInput, TooLarge
from dqcomm.qft import (
    QftSpec,
    aqft_distribute_2,
    aqft_distribute_k,
    aqft_error_bound,
    choose_b,
    dfs_route_certificate,
    qft_distribute_2,
    qft_distribute_k,
    qft_gate_list,
    qft_groups,
    qft_matrix,
)
from dqcomm.simulate import verify_implements
from dqcomm.topology import Topology, check_adjacency

from oracles import data_action, dft, phase_distance, plain_qft


@pytest.mark.parametrize("n", [1, 2, 3, 5, 7])
def test_dense_qft_matches_dft(n):
    assert np.allclose(qft_matrix(n, bit_reversed=True), dft(n))
    assert np.allclose(qft_matrix(n), plain_qft(n))


def test_gate_list_structure():
    gates = qft_gate_list(4)
    assert gates[:4] == [("h", 0), ("cr", 1, 0, 2), ("cr", 2, 0, 3), ("cr", 3, 0, 4)]
    assert sum(1 for g in gates if g[0] == "cr") == 6


def test_truncation_keeps_distance_at_most_b():
    for g in qft_groups(QftSpec(8, approx_b=2)):
        assert all(ctrl - g.target <= 2 for ctrl, _ in g.members)
    assert sum(len(g.members) for g in qft_groups(QftSpec(8, approx_b=2))) == 7 + 6


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("rev", [False, True])
def test_two_party_exact(n, rev):
    c, cert = qft_distribute_2(n, bit_reversed=rev)
    v, leak = data_action(c) if c.num_wires <= 9 else (None, None)
    want = dft(n) if rev else plain_qft(n)
    if v is not None:
        assert phase_distance(want, v) < 1e-9 and leak < 1e-12
    else:
        assert verify_implements(c, want, 1e-9).ok
    assert cert.measured <= n


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 64))
def test_two_party_count_audit(n):
    c, cert = qft_distribute_2(n)
    assert cert.measured == c.nonlocal_count() <= n


@pytest.mark.parametrize("topo", [Topology.path(4), Topology.star(4), Topology.complete(3), Topology.ring(4)])
def test_k_party_exact(topo):
    c, cert = qft_distribute_k(8, topo)
    check_adjacency(c, topo)
    assert verify_implements(c, plain_qft(8), 1e-9).ok
    assert cert.measured <= (4 * topo.k - 4) * 8
    assert cert.params["route_sum"] <= 2 * topo.k - 2


def test_k_party_bit_reversed():
    c, _ = qft_distribute_k(6, Topology.path(3), bit_reversed=True)
    assert verify_implements(c, dft(6), 1e-9).ok


@pytest.mark.parametrize("b", [1, 2, 4, 6])
def test_aqft_error_within_bound(b):
    n = 8
    spec = QftSpec(n, approx_b=b)
    c, cert = aqft_distribute_2(spec)
    rep = verify_implements(c, plain_qft(n), 10.0)
    assert rep.spectral_error <= aqft_error_bound(n, b)
    assert cert.measured <= 2 * b


def test_aqft_k_party_pairwise_crossings():
    spec = QftSpec(8, approx_b=3)
    c, cert = aqft_distribute_k(spec, Topology.path(4))
    assert max(cert.params["pair_crossings"]) <= spec.approx_b
    assert cert.measured <= (4 * 4 - 4) * 3
    assert verify_implements(c, plain_qft(8), 10.0).spectral_error <= aqft_error_bound(8, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 200), st.floats(1e-6, 10.0))
def test_choose_b_is_smallest(n, eps):
    b = choose_b(n, eps)
    assert aqft_error_bound(n, b) <= eps
    if b > 1:
        assert aqft_error_bound(n, b - 1) > eps


def test_choose_b_examples():
    assert choose_b(8, 0.05) == 10
    assert 2 * math.pi * 8 * 2**-10 <= 0.05 < 2 * math.pi * 8 * 2**-9


def test_dfs_route_certificate_on_path():
    cert = dfs_route_certificate(Topology.path(5))
    assert cert.measured == 4 and cert.bound == 8


def test_errors():
    with pytest.raises(InvalidInput):
        QftSpec(0)
    with pytest.raises(InvalidInput):
        QftSpec(4, approx_b=0)
    with pytest.raises(InsufficientAncilla):
        qft_distribute_2(4, m=0)
    with pytest.raises(TooLarge):
        qft_matrix(13)
    with pytest.raises(InvalidInput):
        choose_b(4, 0)
