import itertools
import math

import networkx as nx
import numpy as np
import pytest

from clusterbound import graphs as gr
from clusterbound import kernels
from oracles import classify, union_find_connected

CONNECTED = {2: 1, 3: 4, 4: 38, 5: 728, 6: 26704}
BICONNECTED = {2: 1, 3: 1, 4: 10, 5: 238, 6: 11368}


def nx_graph(g):
    h = nx.Graph()
    h.add_nodes_from(range(1, g.n + 1))
    h.add_edges_from(g.edges)
    return h


def test_edge_index_examples():
    assert gr.edge_index(4, 1, 2) == 0
    assert gr.edge_index(4, 3, 4) == 5
    assert gr.edge_index(4, 2, 1) == 0
    with pytest.raises(ValueError):
        gr.edge_index(4, 2, 2)
    assert gr.n_edges(5) == 10


def test_labeled_graph_roundtrip():
    g = gr.LabeledGraph.from_edges(4, [(1, 2), (2, 3), (3, 4)])
    assert g.edges == [(1, 2), (2, 3), (3, 4)]
    assert gr.is_connected(g) and not gr.is_biconnected(g)
    cycle = gr.LabeledGraph.from_edges(4, [(1, 2), (2, 3), (3, 4), (1, 4)])
    assert gr.is_biconnected(cycle)
    assert gr.is_biconnected(gr.LabeledGraph.from_edges(2, [(1, 2)]))
    assert not gr.is_connected(gr.LabeledGraph(3, 0))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_counts(n, backend):
    assert gr.count_graphs(n, "connected", backend) == CONNECTED[n]
    assert gr.count_graphs(n, "biconnected", backend) == BICONNECTED[n]


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_enumeration_matches_union_find_and_networkx(n):
    con = {g.mask for g in gr.enumerate_connected(n)}
    bic = {g.mask for g in gr.enumerate_biconnected(n)}
    assert bic <= con
    for mask in range(1 << gr.n_edges(n)):
        g = gr.LabeledGraph(n, mask)
        h = nx_graph(g)
        uf = union_find_connected(n, g.edges)
        assert (mask in con) == uf == nx.is_connected(h)
        expect_bic = nx.is_biconnected(h) if n > 2 else uf
        assert (mask in bic) == expect_bic == gr.is_biconnected(g)
        assert classify(n, mask) == (mask in con, mask in bic)


def test_enumeration_is_ascending_and_n6_subset():
    masks = [g.mask for g in gr.enumerate_connected(6)]
    assert masks == sorted(masks)
    bic = set(gr.biconnected_masks(6).tolist())
    assert bic <= set(masks)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_trees(n):
    trees = gr.spanning_trees(n)
    assert len(trees) == gr.tree_count(n) == n ** (n - 2)
    assert all(nx.is_tree(nx_graph(t)) for t in trees)


def test_tree_count_small():
    assert gr.tree_count(1) == 1
    with pytest.raises(ValueError):
        gr.tree_count(0)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_penrose_identity(n, backend):
    full = np.ones((n, n), dtype=bool)
    assert gr.penrose_value(full, backend) == gr.penrose_tree_identity(n) == (-1) ** (n - 1) * math.factorial(n - 1)


def test_penrose_n4_brute_force():
    total = 0
    for g in gr.enumerate_connected(4):
        total += (-1) ** g.n_edges
    assert total == -6


def test_penrose_disconnected_incompatibility_is_zero():
    m = np.eye(4, dtype=bool)
    m[0, 1] = m[1, 0] = m[2, 3] = m[3, 2] = True
    assert gr.penrose_value(m) == 0
    assert gr.penrose_value(np.ones((1, 1), dtype=bool)) == 1


def test_penrose_rejects_bad_input():
    with pytest.raises(ValueError):
        gr.penrose_value(np.ones((9, 9), dtype=bool))
    m = np.ones((3, 3), dtype=bool)
    m[0, 1] = False
    with pytest.raises(ValueError):
        gr.penrose_value(m)
    with pytest.raises(ValueError):
        gr.penrose_value(np.zeros((2, 2), dtype=bool))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_phi_t_table_matches_penrose(n):
    table = gr.phi_t_table(n)
    rng = np.random.default_rng(n)
    for _ in range(30):
        m = rng.random((n, n)) < 0.6
        m = np.triu(m, 1)
        m = m | m.T | np.eye(n, dtype=bool)
        assert table[gr.incompatibility_mask(m)] == gr.penrose_value(m)


def test_phi_t_table_zero_on_disconnected():
    n = 5
    table = gr.phi_t_table(n)
    flags = kernels.graph_flags(n, 0, 1 << gr.n_edges(n))
    assert np.all(table[(flags & kernels.CONNECTED) == 0] == 0)
    assert table[-1] == gr.penrose_tree_identity(n)


def test_phi_t_table_complete_graph_values():
    for n in range(2, 8):
        assert gr.phi_t_table(n)[-1] == gr.penrose_tree_identity(n)


def test_check_n():
    with pytest.raises(ValueError):
        gr.count_graphs(1)
    with pytest.raises(ValueError):
        list(gr.enumerate_connected(9))
