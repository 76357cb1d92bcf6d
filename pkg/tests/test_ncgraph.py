import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncgt import graphs as gr
from ncgt.linalg import InvariantError, OrthonormalFamily, fourier_vectors, random_unitary, same_subspace, span, tensor
from ncgt.ncgraph import (
    amplify,
    box_product,
    conjugate,
    diagonal_span,
    full_algebra,
    permutation_matrix,
    recognize_graph,
    scalars,
    system_from_graph,
    traceless_from_graph,
    zero_space,
)


def small_graphs(nmax=4):
    return [g for n in range(1, nmax + 1) for g in gr.all_graphs(n)]


def test_system_from_graph_examples():
    s = system_from_graph(gr.complete(2))
    assert s.dim == 4 and same_subspace(s, full_algebra(2))
    e = system_from_graph(gr.empty(3))
    assert e.dim == 3 and same_subspace(e, span([np.diag(np.eye(3)[i]) for i in range(3)]))
    # P_3: three diagonal units plus E12, E21, E23, E32
    assert system_from_graph(gr.path(3)).dim == 7


def test_traceless_from_graph_examples():
    j = traceless_from_graph(gr.complete(2))
    assert j.dim == 2 and j.kind == "traceless"
    assert traceless_from_graph(gr.empty(4)).dim == 0
    for g in small_graphs():
        assert same_subspace(system_from_graph(g).perp(), traceless_from_graph(gr.complement(g)))


def test_duality_up_to_six_vertices():
    for g in [g for n in range(1, 7) for g in gr.all_graphs(n)][::3]:
        gc = gr.complement(g)
        assert same_subspace(system_from_graph(g).perp(), traceless_from_graph(gc))
        assert same_subspace(traceless_from_graph(g).perp(), system_from_graph(gc))


def test_conjugate_examples():
    v = traceless_from_graph(gr.cycle(5))
    assert same_subspace(conjugate(v, np.eye(5)), v)
    sigma = [2, 0, 1, 4, 3]
    relabelled = traceless_from_graph(gr.cycle(5).relabel(sigma))
    assert same_subspace(conjugate(v, permutation_matrix(sigma)), relabelled)
    rng = np.random.default_rng(0)
    w = span(rng.standard_normal((5, 4, 4)))
    assert conjugate(w, random_unitary(4, 1)).dim == 5


def test_conjugate_rejects_non_unitary():
    with pytest.raises(InvariantError):
        conjugate(scalars(2), np.array([[1, 1], [0, 1]]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10), st.integers(0, 2**32 - 1))
def test_conjugate_round_trip(dim, seed):
    rng = np.random.default_rng(seed)
    v = span(rng.standard_normal((dim, 3, 3)) + 1j * rng.standard_normal((dim, 3, 3)), n=3)
    u = random_unitary(3, rng)
    assert same_subspace(conjugate(conjugate(v, u), u.conj().T), v)


def test_amplify_examples():
    v = traceless_from_graph(gr.path(3))
    assert amplify(v, 1) is v
    for d in (2, 3):
        a = amplify(v, d)
        assert a.dim == d * d * v.dim and a.n == d * 3 and a.kind == "traceless"
    s = amplify(scalars(3), 2)
    assert s.dim == 4
    assert same_subspace(s, tensor(full_algebra(2), scalars(3)))
    assert amplify(system_from_graph(gr.path(3)), 2).kind == "system"


def test_amplified_system_is_blowup():
    for g in small_graphs(3):
        rec = recognize_graph(amplify(system_from_graph(g), 2))
        assert rec is not None and rec[1] == "system" and rec[0] == gr.blowup(g, 2)


def test_diagonal_span_examples():
    d = diagonal_span(OrthonormalFamily.standard(3))
    assert same_subspace(d, span([np.diag(np.eye(3)[i]) for i in range(3)]))
    f = fourier_vectors(4)
    df = diagonal_span(OrthonormalFamily(f))
    circulants = [np.outer(f[k], f[k].conj()) for k in range(4)]
    assert same_subspace(df, span(circulants))
    for k in range(4):
        c = circulants[k]
        assert np.allclose(c, np.roll(np.roll(c, 1, axis=0), 1, axis=1))
    x = OrthonormalFamily(random_unitary(4, 8).T)
    assert diagonal_span(x).outside_norm(np.eye(4)) <= 1e-8


def test_diagonal_span_needs_full_basis():
    with pytest.raises(InvariantError):
        diagonal_span(OrthonormalFamily(np.eye(3)[:2]))


def test_box_product_examples():
    k2 = gr.complete(2)
    j = traceless_from_graph(k2)
    assert same_subspace(box_product(j, j), traceless_from_graph(gr.cartesian_product(k2, k2)))
    assert box_product(zero_space(2), zero_space(3)).dim == 0
    for g, h in [(gr.path(3), gr.cycle(4)), (gr.star(3), gr.complete(2))]:
        b = box_product(traceless_from_graph(g), traceless_from_graph(h))
        assert b.dim == 2 * len(g.edges) * h.n + g.n * 2 * len(h.edges)


def test_products_match_graph_products():
    graphs = small_graphs(3) + [gr.cycle(4)]
    for g, h in itertools.product(graphs, repeat=2):
        jg, jh = traceless_from_graph(g), traceless_from_graph(h)
        assert same_subspace(tensor(jg, jh), traceless_from_graph(gr.categorical_product(g, h)))
        assert same_subspace(box_product(jg, jh), traceless_from_graph(gr.cartesian_product(g, h)))


def test_box_product_nonstandard_bases_is_traceless():
    jg = traceless_from_graph(gr.path(3))
    jh = traceless_from_graph(gr.complete(2))
    b = box_product(jg, jh, OrthonormalFamily(fourier_vectors(3)), OrthonormalFamily(random_unitary(2, 3).T))
    assert b.kind == "traceless"
    assert np.max(np.abs(np.trace(b.basis, axis1=1, axis2=2))) <= 1e-12


def test_recognize_graph():
    g = gr.cycle(5)
    assert recognize_graph(system_from_graph(g))[:2] == (g, "system")
    assert recognize_graph(traceless_from_graph(g))[:2] == (g, "traceless")
    assert recognize_graph(conjugate(system_from_graph(gr.path(3)), random_unitary(3, 2))) is None
    mixed = span([np.diag([1.0, 0, 0])])
    assert recognize_graph(mixed) is None
