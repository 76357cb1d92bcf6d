import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncgt import graphs as gr
from ncgt.graphs import Graph, GraphFormatError


def brute_alpha(g):
    for k in range(g.n, 0, -1):
        for sub in itertools.combinations(range(g.n), k):
            if not any(g.adjacent(i, j) for i, j in itertools.combinations(sub, 2)):
                return k
    return 0


def brute_chi(g):
    if g.n == 0:
        return 0
    for k in range(1, g.n + 1):
        for col in itertools.product(range(k), repeat=g.n):
            if all(col[i] != col[j] for i, j in g.edges):
                return k


def random_graphs(count, nmax, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield gr.random_graph(int(rng.integers(1, nmax + 1)), float(rng.uniform(0.1, 0.9)), rng)


def test_complement_examples():
    assert gr.complement(gr.complete(4)) == gr.empty(4)
    pentagram = Graph.from_edges(5, [(i, (i + 2) % 5) for i in range(5)])
    assert gr.complement(gr.cycle(5)) == pentagram
    assert gr.complement(gr.complement(gr.path(3))) == gr.path(3)


def test_cartesian_product_examples():
    k2 = gr.complete(2)
    c4 = gr.cartesian_product(k2, k2)
    assert c4.n == 4 and len(c4.edges) == 4
    assert all(len(c4.neighbours(v)) == 2 for v in range(4))
    g = gr.cycle(5)
    assert gr.cartesian_product(g, gr.complete(1)) == g
    for g, h in [(gr.path(3), gr.cycle(4)), (gr.star(3), gr.complete(3))]:
        p = gr.cartesian_product(g, h)
        assert len(p.edges) == len(g.edges) * h.n + g.n * len(h.edges)


def test_categorical_product_examples():
    k2, k3 = gr.complete(2), gr.complete(3)
    p = gr.categorical_product(k2, k2)
    assert p.n == 4 and len(p.edges) == 2
    # (i,k) ~ (j,l) iff i != j and k != l, with index 2*i + k
    assert p.edges == frozenset({(0, 3), (1, 2)})
    assert gr.categorical_product(gr.cycle(5), gr.empty(3)).edges == frozenset()
    c6 = gr.categorical_product(k2, k3)
    # a 2-regular connected graph on 6 vertices is C_6
    assert c6.n == 6 and len(c6.edges) == 6
    assert all(len(c6.neighbours(v)) == 2 for v in range(6))
    seen, todo = {0}, [0]
    while todo:
        for u in c6.neighbours(todo.pop()):
            if u not in seen:
                seen.add(u)
                todo.append(u)
    assert len(seen) == 6


def test_exact_parameters_examples():
    c5 = gr.cycle(5)
    assert (gr.alpha_exact(c5), gr.omega_exact(c5), gr.chi_exact(c5)) == (brute_alpha(c5), 2, brute_chi(c5))
    assert (brute_alpha(c5), brute_chi(c5)) == (2, 3)
    for n in range(1, 7):
        assert (gr.alpha_exact(gr.complete(n)), gr.omega_exact(gr.complete(n)), gr.chi_exact(gr.complete(n))) == (1, n, n)
        assert (gr.alpha_exact(gr.empty(n)), gr.omega_exact(gr.empty(n)), gr.chi_exact(gr.empty(n))) == (n, 1, 1)


def test_exact_oracles_against_brute_force():
    for g in random_graphs(60, 7, 3):
        assert gr.alpha_exact(g) == brute_alpha(g)
        assert gr.chi_exact(g) == brute_chi(g)
        assert gr.is_proper_colouring(g, gr.optimal_colouring(g))


def test_exact_unavailable_beyond_limit():
    with pytest.raises(gr.ExactUnavailable):
        gr.alpha_exact(gr.empty(41))
    with pytest.raises(gr.ExactUnavailable):
        gr.alpha_exact(gr.random_graph(30, 0.5, 1), budget=3)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.floats(0.0, 1.0), st.integers(0, 2**32 - 1))
def test_alpha_omega_chi_relations(n, p, seed):
    g = gr.random_graph(n, p, seed)
    a, w, c = gr.alpha_exact(g), gr.omega_exact(g), gr.chi_exact(g)
    assert a == gr.omega_exact(gr.complement(g))
    assert c >= w
    assert c * a >= n


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_sabidussi_and_hedetniemi_classical(n, m, seed):
    rng = np.random.default_rng(seed)
    g, h = gr.random_graph(n, 0.5, rng), gr.random_graph(m, 0.5, rng)
    assert gr.chi_exact(gr.cartesian_product(g, h)) == max(gr.chi_exact(g), gr.chi_exact(h))
    assert gr.chi_exact(gr.categorical_product(g, h)) <= min(gr.chi_exact(g), gr.chi_exact(h))


def test_all_graphs_counts():
    assert [len(gr.all_graphs(n)) for n in range(1, 6)] == [1, 2, 4, 11, 34]


def test_parse_graph_examples():
    assert gr.parse_graph("2 1\n1 2") == gr.complete(2)
    assert gr.parse_graph("3 0") == gr.empty(3)
    with pytest.raises(GraphFormatError, match="loop"):
        gr.parse_graph("2 1\n1 1")


def test_parse_graph_errors():
    for text in ["", "x y", "3 1\n1 4", "3 2\n1 2", "3 1\n1 2 3", "3 1\na b"]:
        with pytest.raises(GraphFormatError):
            gr.parse_graph(text)


def test_parse_graph_duplicate_edge_warns():
    with pytest.warns(UserWarning, match="duplicate"):
        g = gr.parse_graph("3 2\n1 2\n2 1\n")
    assert len(g.edges) == 1


def test_parse_emit_round_trip():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for g in random_graphs(30, 8, 11):
            assert gr.parse_graph(gr.emit_graph(g)) == g


def test_graph_rejects_loops():
    with pytest.raises(GraphFormatError):
        Graph.from_edges(3, [(1, 1)])
