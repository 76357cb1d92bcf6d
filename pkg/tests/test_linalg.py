import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncgt.linalg import (
    DimensionError,
    InvariantError,
    OrthonormalFamily,
    hermitian_eig,
    hs_inner,
    hs_norm,
    matrix_unit,
    perp,
    project,
    random_unitary,
    same_subspace,
    span,
    tensor,
)
from ncgt.graphs import categorical_product, complement, complete, path
from ncgt.ncgraph import system_from_graph, traceless_from_graph


def E(n, i, j):
    return matrix_unit(n, i - 1, j - 1)


def test_hs_inner_examples():
    assert hs_inner(E(2, 1, 1), E(2, 1, 1)) == 1
    assert hs_inner(E(2, 1, 2), E(2, 2, 1)) == 0
    assert hs_inner(np.eye(4), np.eye(4)) == 4


def test_hs_inner_dimension_mismatch():
    with pytest.raises(DimensionError):
        hs_inner(np.eye(2), np.eye(3))


def test_hs_inner_is_trace_of_b_star_a():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.isclose(hs_inner(a, b), np.trace(b.conj().T @ a))
    assert np.isclose(hs_inner(2j * a, b), 2j * hs_inner(a, b))


def test_hermitian_eig_examples():
    w, v = hermitian_eig(np.diag([3.0, -1.0]))
    assert np.allclose(w, [3, -1])
    assert np.allclose(np.abs(v), np.eye(2))
    w, _ = hermitian_eig(np.array([[0, 1], [1, 0]]))
    assert np.allclose(w, [1, -1])
    w, _ = hermitian_eig(np.ones((5, 5)))
    assert np.allclose(w, [5, 0, 0, 0, 0], atol=1e-10)


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(InvariantError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_hermitian_eig_matches_power_iteration():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    a = a + a.conj().T
    w, _ = hermitian_eig(a)
    x = rng.standard_normal(6) + 0j
    for _ in range(3000):
        x = a @ (a @ x)
        x /= np.linalg.norm(x)
    est = np.sqrt(np.real(x.conj() @ a @ a @ x))
    assert abs(np.max(np.abs(w)) - est) < 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_hermitian_eig_reconstructs(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    a = a + a.conj().T
    w, v = hermitian_eig(a)
    assert np.all(np.diff(w) <= 1e-12)
    assert hs_norm(v @ np.diag(w) @ v.conj().T - a) <= 1e-10 * max(1.0, hs_norm(a))
    assert hs_norm(v.conj().T @ v - np.eye(n)) <= 1e-10


def test_span_examples():
    assert span([E(2, 1, 1), E(2, 1, 1), E(2, 2, 2)]).dim == 2
    s = span([np.eye(2), E(2, 1, 2), E(2, 2, 1)], kind="system")
    assert s.dim == 3 and s.kind == "system"
    with pytest.raises(InvariantError):
        span([E(2, 1, 2)], kind="traceless")


def test_span_requires_identity_for_system():
    with pytest.raises(InvariantError):
        span([E(2, 1, 2), E(2, 2, 1)], kind="system")


def test_project_examples():
    assert np.allclose(project(E(2, 1, 2), span([np.eye(2)])), 0)
    assert np.allclose(project(np.eye(2), span([np.eye(2)])), np.eye(2))
    # <E11, I/sqrt2> (I/sqrt2) computed directly
    b = np.eye(2) / np.sqrt(2)
    oracle = np.trace(b.conj().T @ E(2, 1, 1)) * b
    assert np.allclose(project(E(2, 1, 1), span([b])), oracle)
    assert np.allclose(oracle, np.eye(2) / 2)


def test_perp_examples():
    for n in (2, 3, 4):
        c = perp(span([np.eye(n)], kind="system"))
        assert c.dim == n * n - 1 and c.kind == "traceless"
    g = path(3)
    assert same_subspace(perp(system_from_graph(g)), traceless_from_graph(complement(g)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 16), st.integers(0, 2**32 - 1))
def test_perp_is_an_involution(dim, seed):
    rng = np.random.default_rng(seed)
    mats = rng.standard_normal((dim, 4, 4)) + 1j * rng.standard_normal((dim, 4, 4))
    v = span(mats, n=4)
    assert v.dim + v.perp().dim == 16
    assert same_subspace(v.perp().perp(), v)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_projection_properties(k, seed):
    rng = np.random.default_rng(seed)
    mats = rng.standard_normal((k, 3, 3)) + 1j * rng.standard_normal((k, 3, 3))
    v = span(mats)
    for m in mats:
        assert hs_norm(project(m, v) - m) <= 1e-9 * hs_norm(m)
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    p = project(x, v)
    assert hs_norm(project(p, v) - p) <= 1e-10
    assert np.max(np.abs(v.coefficients(x - p))) <= 1e-9
    a, b = mats[0], x
    assert np.isclose(hs_inner(a, b), np.conj(hs_inner(b, a)))
    assert abs(hs_inner(a, b)) <= hs_norm(a) * hs_norm(b) + 1e-12


def test_tensor_examples():
    k = tensor(E(2, 1, 2), E(2, 1, 1))
    # row (1,1) -> 0, column (2,1) -> 2 under the i*m + k convention
    assert np.array_equal(k, matrix_unit(4, 0, 2))
    s = tensor(span([np.eye(2)]), span([np.eye(2)]))
    assert same_subspace(s, span([np.eye(4)]))
    j = traceless_from_graph(complete(2))
    oracle = traceless_from_graph(categorical_product(complete(2), complete(2)))
    prod = tensor(j, j)
    assert prod.dim == j.dim * j.dim
    assert same_subspace(prod, oracle)


def test_random_unitary():
    u = random_unitary(1, 3)
    assert u.shape == (1, 1) and np.isclose(abs(u[0, 0]), 1)
    for n in (2, 5, 9):
        u = random_unitary(n, n)
        assert hs_norm(u.conj().T @ u - np.eye(n)) <= 1e-9
    assert np.array_equal(random_unitary(4, 12), random_unitary(4, 12))


def test_orthonormal_family_checks_gram():
    OrthonormalFamily(np.eye(3)[:2])
    with pytest.raises(InvariantError):
        OrthonormalFamily(np.array([[1, 0], [1, 1]]))
