import numpy as np
import pytest

from ncgt import graphs as gr
from ncgt.homomorphism import (
    IsometryCertificate,
    KrausMap,
    as_kraus,
    box_left_embedding,
    box_right_embedding,
    certificate_from_json,
    certificate_to_json,
    channel_distance,
    chi0_monotonicity,
    embed_amplify,
    graph_hom_map,
    identity_map,
    isometry_to_kraus,
    kraus_to_isometry,
    partial_trace,
    partial_trace_map,
    transport_colouring,
    unitary_map,
    verify_hom,
)
from ncgt.linalg import DimensionError, InvariantError, OrthonormalFamily, matrix_unit, random_unitary, span
from ncgt.ncgraph import amplify, box_product, diagonal_span, permutation_matrix, traceless_from_graph
from ncgt.parameters import Colouring, chi0_estimate


def random_channel(n, r, seed):
    """Kraus operators from the blocks of a Haar isometry C^n -> C^r (x) C^n."""
    u = random_unitary(r * n, seed)[:, :n]
    return KrausMap(n, n, u.reshape(r, n, n))


def test_verify_hom_inclusion_and_unitary():
    g = gr.path(4)
    j = traceless_from_graph(g)
    assert verify_hom(identity_map(4), j, traceless_from_graph(gr.complete(4)))[0]
    assert not verify_hom(identity_map(4), traceless_from_graph(gr.complete(4)), j)[0]
    sigma = [3, 1, 0, 2]
    ok, worst = verify_hom(unitary_map(permutation_matrix(sigma)), j, traceless_from_graph(g.relabel(sigma)))
    assert ok and worst <= 1e-12


def test_verify_hom_box_embeddings():
    jg, jh = traceless_from_graph(gr.path(3)), traceless_from_graph(gr.complete(2))
    v = OrthonormalFamily(random_unitary(3, 1).T)
    w = OrthonormalFamily(random_unitary(2, 2).T)
    target = box_product(jg, jh, v, w)
    # X -> X (x) w1 w1* lands in J (x) D_w, Y -> v1 v1* (x) Y in D_v (x) K
    left = box_left_embedding(3, w.vectors[0])
    assert verify_hom(left, jg, target)[0]
    right = box_right_embedding(2, v.vectors[0])
    assert verify_hom(right, jh, target)[0]
    assert diagonal_span(w).contains(np.outer(w.vectors[0], w.vectors[0].conj()))
    assert not verify_hom(box_left_embedding(3, w.vectors[0]), traceless_from_graph(gr.complete(3)), target)[0]


def test_verify_hom_rejects_non_tp_and_bad_shapes():
    k = KrausMap(2, 2, 2 * np.eye(2)[None])
    j = traceless_from_graph(gr.complete(2))
    with pytest.raises(InvariantError):
        verify_hom(k, j, j)
    with pytest.raises(DimensionError):
        verify_hom(identity_map(3), j, j)


def test_embed_amplify_examples():
    e1 = embed_amplify(3, 1)
    assert channel_distance(e1, identity_map(3)) <= 1e-12
    for d in (2, 3):
        e = embed_amplify(3, d)
        assert e.tp_defect() <= 1e-12
    j = traceless_from_graph(gr.complete(2))
    assert verify_hom(embed_amplify(2, 2), j, amplify(j, 2))[0]
    x = np.arange(4.0).reshape(2, 2)
    assert np.allclose(embed_amplify(2, 3).apply(x), np.kron(np.eye(3), x) / 3)


def test_partial_trace_examples():
    rng = np.random.default_rng(0)
    b = rng.standard_normal((3, 3))
    assert np.allclose(partial_trace(np.kron(np.eye(2), b), 2, 3), 2 * b)
    assert np.allclose(partial_trace(np.kron(matrix_unit(2, 0, 1), b), 2, 3), 0)
    x = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    assert np.isclose(np.trace(partial_trace(x, 2, 3)), np.trace(x))
    a = rng.standard_normal((2, 2))
    assert np.allclose(partial_trace(np.kron(a, b), 2, 3), np.trace(a) * b)
    assert np.allclose(partial_trace_map(3, 2).apply(x), partial_trace(x, 2, 3))
    with pytest.raises(DimensionError):
        partial_trace(np.eye(5), 2, 3)


def test_partial_trace_is_a_homomorphism():
    j = traceless_from_graph(gr.cycle(4))
    assert verify_hom(partial_trace_map(4, 2), amplify(j, 2), j)[0]


def test_isometry_round_trip():
    u = random_unitary(3, 5)
    c = kraus_to_isometry(unitary_map(u))
    assert c.d == 1 and np.allclose(c.E, u)
    k = random_channel(3, 3, 7)
    assert k.tp_defect() <= 1e-12
    c = kraus_to_isometry(k)
    assert c.d == 3 and c.E.shape == (9, 3)
    back = isometry_to_kraus(c)
    assert channel_distance(back, k) <= 1e-9
    # E = sum_k e_k (x) E_k: the isometry applied to x is the stacked Kraus images
    x = np.array([1.0, 2j, -1.0])
    assert np.allclose(c.E @ x, np.concatenate([e @ x for e in k.kraus]))


def test_two_kraus_stack():
    ops = np.array([np.eye(2), np.diag([1, -1])]) / np.sqrt(2)
    c = kraus_to_isometry(KrausMap(2, 2, ops))
    assert c.d == 2
    assert np.allclose(c.E.conj().T @ c.E, np.eye(2))


def test_isometry_check_rejects_defect():
    with pytest.raises(InvariantError):
        isometry_to_kraus(IsometryCertificate(1, 2 * np.eye(2)))


def test_certificate_json_round_trip():
    k = random_channel(3, 2, 3)
    back = certificate_from_json(certificate_to_json(k))
    assert channel_distance(back, k) == 0.0
    c = kraus_to_isometry(k)
    back = as_kraus(certificate_from_json(certificate_to_json(c)))
    assert channel_distance(back, k) <= 1e-12


def test_graph_hom_map():
    c6, k2 = gr.cycle(6), gr.complete(2)
    f = [i % 2 for i in range(6)]
    k = graph_hom_map(c6, k2, f)
    assert k.tp_defect() == 0.0
    assert verify_hom(k, traceless_from_graph(c6), traceless_from_graph(k2))[0]
    assert not verify_hom(k, traceless_from_graph(gr.complete(6)), traceless_from_graph(k2))[0]
    with pytest.raises(InvariantError):
        graph_hom_map(gr.cycle(5), k2, [i % 2 for i in range(5)])


def test_transport_colouring_inclusion():
    g = gr.cycle(5)
    j = traceless_from_graph(g)
    target = chi0_estimate(j)
    moved = transport_colouring(identity_map(5), target.witness)
    moved.validate(j)
    assert moved.size == target.upper


def test_transport_drops_dependent_vectors():
    # E* e_2 and E* e_3 are parallel, so the third part adds nothing and is dropped
    r = 1 / np.sqrt(2)
    k = KrausMap(2, 3, np.array([[[1, 0], [0, r], [0, r]]]))
    col = Colouring(np.eye(3), [(0,), (1,), (2,)], "minimal")
    moved = transport_colouring(k, col)
    assert moved.basis.shape == (2, 2) and moved.parts == ((0,), (1,))
    moved.validate(traceless_from_graph(gr.complete(2)))
    with pytest.raises(DimensionError):
        transport_colouring(k, Colouring(np.eye(2), [(0,), (1,)], "minimal"))


def test_chi0_monotonicity_on_graph_homs():
    cases = [
        (identity_map(4), traceless_from_graph(gr.path(4)), traceless_from_graph(gr.complete(4))),
        (embed_amplify(3, 2), traceless_from_graph(gr.path(3)), amplify(traceless_from_graph(gr.path(3)), 2)),
    ]
    for k, j, t in cases:
        rep = chi0_monotonicity(k, j, t, seed=0)
        assert rep.hom_ok and rep.passed
        assert rep.source_upper <= rep.target_upper


def test_verify_hom_on_random_subspace_images():
    # the image of J under a channel spans a space the channel maps J into
    k = random_channel(3, 2, 12)
    j = traceless_from_graph(gr.path(3))
    imgs = [a @ b @ c.conj().T for a in k.kraus for b in j.basis for c in k.kraus]
    t = span(imgs)
    assert verify_hom(k, j, t)[0]
