import pytest
from hypothesis import given, settings, strategies as st

from dqcomm.circuit import DistributedCircuit, Gate, Partition, anc, data
from dqcomm.errors import InsufficientAncilla, InvalidTopology, ParseError
from dqcomm.topology import Topology, check_adjacency, parse_topology, route_state
from dqcomm.simulate import restricted_action

import numpy as np


@st.composite
def connected_graphs(draw):
    k = draw(st.integers(1, 8))
    # random tree plus extra edges keeps the graph connected
    edges = [(draw(st.integers(0, v - 1)), v) for v in range(1, k)]
    extra = draw(st.lists(st.tuples(st.integers(0, k - 1), st.integers(0, k - 1)), max_size=6))
    edges += [(a, b) for a, b in extra if a != b]
    return Topology(k, tuple(edges))


def test_named_topologies():
    assert Topology.path(4).diameter() == 3
    assert Topology.star(5).diameter() == 2
    assert Topology.ring(6).diameter() == 3
    assert Topology.complete(4).is_complete()


@settings(max_examples=60, deadline=None)
@given(connected_graphs())
def test_dfs_route_sum_at_most_2k_minus_2(topo):
    tree = topo.spanning_tree(0)
    assert tree.is_tree()
    order = tree.dfs_preorder(0)
    assert sorted(order) == list(range(topo.k))
    total = sum(tree.distance(order[i], order[i + 1]) for i in range(topo.k - 1))
    assert total <= 2 * topo.k - 2


@settings(max_examples=60, deadline=None)
@given(connected_graphs(), st.data())
def test_shortest_path_is_a_path(topo, d):
    u = d.draw(st.integers(0, topo.k - 1))
    v = d.draw(st.integers(0, topo.k - 1))
    path = topo.shortest_path(u, v)
    assert path[0] == u and path[-1] == v
    assert len(path) - 1 == topo.distance(u, v)
    edges = set(topo.edges)
    assert all((min(a, b), max(a, b)) in edges for a, b in zip(path, path[1:]))


def test_invalid_topologies():
    with pytest.raises(InvalidTopology):
        Topology(3, ((0, 1),))
    with pytest.raises(InvalidTopology):
        Topology(2, ((0, 0), (0, 1)))
    with pytest.raises(InvalidTopology):
        Topology(2, ((0, 2),))


def test_parse_topology_forms():
    assert parse_topology('{"k": 3, "edges": [[0, 1], [1, 2]]}') == Topology.path(3)
    assert parse_topology("# path\nk 3\n0 1\n2 1\n") == Topology.path(3)
    with pytest.raises(ParseError) as e:
        parse_topology("0 1\n1 x\n")
    assert e.value.line == 2
    with pytest.raises(ParseError) as e:
        parse_topology('{"k": 2}')
    assert e.value.field == "edges"


def test_route_state_moves_and_cleans_up():
    c = DistributedCircuit(Partition.balanced(3, 3), m=1)
    src = data(0, 0)
    end = route_state(c, src, [0, 1, 2])
    assert end == anc(2) and c.nonlocal_count() == 2
    route_state(c, end, [2, 1, 0], dst=src)
    v = restricted_action(c)
    assert np.allclose(v, np.eye(8))


def test_route_state_needs_ancilla():
    c = DistributedCircuit(Partition.balanced(2, 2), m=0)
    with pytest.raises(InsufficientAncilla):
        route_state(c, data(0, 0), [0, 1])


def test_check_adjacency():
    topo = Topology.path(3)
    c = DistributedCircuit(Partition.balanced(3, 3))
    c.append(Gate.cnot(data(0, 0), data(1, 0)))
    check_adjacency(c, topo)
    c.append(Gate.cnot(data(0, 0), data(2, 0)))
    with pytest.raises(InvalidTopology):
        check_adjacency(c, topo)
