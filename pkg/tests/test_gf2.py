import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dqcomm.errors import NotInvertible
from dqcomm.gf2 import (
    F2Matrix,
    cnot_circuit_matrix,
    f2_local_synth,
    f2_plu,
    f2_random_invertible,
    f2_rank,
)

from oracles import cnot_list_bits, f2_apply, f2_rank_dense, pack, unpack

bit_arrays = st.integers(1, 7).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=n, max_size=n)
)


@settings(max_examples=60, deadline=None)
@given(bit_arrays)
def test_rank_matches_dense_elimination(rows):
    a = np.array(rows)
    assert f2_rank(F2Matrix.from_array(a)) == f2_rank_dense(a)


@settings(max_examples=40, deadline=None)
@given(bit_arrays, st.integers(0, 2**7 - 1))
def test_apply_matches_dense_product(rows, x):
    a = np.array(rows)
    n = a.shape[0]
    x &= (1 << n) - 1
    m = F2Matrix.from_array(a)
    assert m.apply(x) == pack(f2_apply(a, unpack([x], n)))[0]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10**6))
def test_inverse_and_plu(n, seed):
    m = f2_random_invertible(n, seed)
    assert m @ m.inverse() == F2Matrix.identity(n)
    perm, low, up = f2_plu(m)
    assert low.is_lower_unitriangular() and up.is_upper_triangular()
    assert F2Matrix.permutation(perm) @ low @ up == m


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10), st.integers(0, 10**6))
def test_local_synth_realises_matrix(n, seed):
    m = f2_random_invertible(n, seed)
    gates = f2_local_synth(m)
    assert cnot_circuit_matrix(n, gates) == m
    assert len(gates) <= n * n
    bits = unpack(range(min(2**n, 64)), n)
    assert np.array_equal(cnot_list_bits(n, gates, bits), f2_apply(m.to_array(), bits))


def test_singular_matrix_raises():
    m = F2Matrix.from_array([[1, 1], [1, 1]])
    with pytest.raises(NotInvertible):
        m.inverse()
    with pytest.raises(NotInvertible):
        f2_plu(m)


def test_permutation_semantics():
    p = F2Matrix.permutation([2, 0, 1])
    x = 0b110  # x0=0, x1=1, x2=1
    y = p.apply(x)
    assert [(y >> i) & 1 for i in range(3)] == [1, 0, 1]
