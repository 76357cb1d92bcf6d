"""Operator-system and traceless-space representations of graphs, and their products."""

from __future__ import annotations

import numpy as np

from .graphs import Graph
from .linalg import (
    TOL_ORTH,
    InvariantError,
    MatrixSubspace,
    OrthonormalFamily,
    adjoint,
    check_kind,
    infer_kind,
    span,
    sum_space,
    tensor,
    with_kind,
)


def _unit_stack(n: int, pairs) -> np.ndarray:
    pairs = list(pairs)
    out = np.zeros((len(pairs), n, n), dtype=complex)
    for t, (i, j) in enumerate(pairs):
        out[t, i, j] = 1.0
    return out


def system_from_graph(g: Graph) -> MatrixSubspace:
    """``S_G``: span of ``E_ii`` and ``E_ij`` for every edge, both orientations."""
    pairs = [(i, i) for i in range(g.n)]
    for i, j in g.sorted_edges():
        pairs += [(i, j), (j, i)]
    sub = MatrixSubspace(g.n, _unit_stack(g.n, pairs), "system")
    check_kind(sub, "system")
    return sub


def traceless_from_graph(g: Graph) -> MatrixSubspace:
    """``J_G``: span of ``E_ij`` over ordered adjacent pairs."""
    pairs = []
    for i, j in g.sorted_edges():
        pairs += [(i, j), (j, i)]
    return MatrixSubspace(g.n, _unit_stack(g.n, pairs), "traceless")


def full_algebra(n: int) -> MatrixSubspace:
    return MatrixSubspace(n, _unit_stack(n, [(i, j) for i in range(n) for j in range(n)]), "system")


def zero_space(n: int) -> MatrixSubspace:
    return MatrixSubspace(n, np.zeros((0, n, n), dtype=complex), "traceless")


def scalars(n: int) -> MatrixSubspace:
    return span([np.eye(n)], kind="system")


def offdiagonal_system(n: int) -> MatrixSubspace:
    """``span{I, E_ij : i != j}``, the system with independence number 1."""
    mats = [np.eye(n)] + list(_unit_stack(n, [(i, j) for i in range(n) for j in range(n) if i != j]))
    return span(mats, kind="system")


def delta_matrix(n: int) -> np.ndarray:
    """``diag(n-1, -1, ..., -1)``: traceless with ``I + Delta`` of norm ``n``."""
    d = -np.ones(n)
    d[0] = n - 1
    return np.diag(d).astype(complex)


def delta_space(n: int) -> MatrixSubspace:
    return span([delta_matrix(n)], kind="traceless")


def conjugate(v: MatrixSubspace, u) -> MatrixSubspace:
    """``u V u*`` for a unitary ``u``; kind and dimension are preserved."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (v.n, v.n):
        raise InvariantError(f"conjugating unitary must be {v.n}x{v.n}")
    if np.max(np.abs(adjoint(u) @ u - np.eye(v.n))) > TOL_ORTH:
        raise InvariantError("conjugate needs a unitary matrix")
    basis = u @ v.basis @ adjoint(u)
    return MatrixSubspace(v.n, basis, v.kind)


def permutation_matrix(perm) -> np.ndarray:
    """Unitary sending ``e_i`` to ``e_{perm[i]}``."""
    n = len(perm)
    p = np.zeros((n, n), dtype=complex)
    p[list(perm), list(range(n))] = 1.0
    return p


def amplify(v: MatrixSubspace, d: int) -> MatrixSubspace:
    """``M_d(V)`` realised as ``M_d (x) V`` with the package's Kronecker order."""
    if d < 1:
        raise ValueError("amplification degree must be >= 1")
    if d == 1:
        return v
    kind = v.kind if v.kind in ("system", "traceless") else "plain"
    return tensor(full_algebra(d), v, kind=kind)


def diagonal_span(x) -> MatrixSubspace:
    """``D_x = span{x_i x_i*}`` for a full orthonormal basis ``x``."""
    if not isinstance(x, OrthonormalFamily):
        x = OrthonormalFamily(x)
    if not x.is_full:
        raise InvariantError("diagonal_span needs a full orthonormal basis")
    projs = np.einsum("ia,ib->iab", x.vectors, x.vectors.conj())
    # orthogonal rank-one projections are HS-orthonormal already
    return with_kind(MatrixSubspace(x.n, projs, "plain"), "system")


def box_product(j: MatrixSubspace, k: MatrixSubspace, v=None, w=None) -> MatrixSubspace:
    """``(J box K)_{v,w} = J (x) D_w + D_v (x) K``; standard bases by default."""
    for space in (j, k):
        if space.kind != "traceless":
            check_kind(space, "traceless")
    v = OrthonormalFamily.standard(j.n) if v is None else v
    w = OrthonormalFamily.standard(k.n) if w is None else w
    left = tensor(j, diagonal_span(w), kind="traceless")
    right = tensor(diagonal_span(v), k, kind="traceless")
    return sum_space([left, right], kind="traceless")


def categorical_product(j: MatrixSubspace, k: MatrixSubspace) -> MatrixSubspace:
    """``J (x) K``; traceless when either factor is."""
    return tensor(j, k)


def as_traceless(v: MatrixSubspace) -> MatrixSubspace:
    return with_kind(v, "traceless")


def kind_of(v: MatrixSubspace) -> str:
    return infer_kind(v)


# A relation (membership or orthogonality) holds when its residual is at most
# REL_LOOSE; residuals between REL_TIGHT and REL_LOOSE are "marginal".
REL_TIGHT = 1e-9
REL_LOOSE = 1e-7


def recognize_graph(x: MatrixSubspace):
    """Return ``(G, "system"|"traceless", marginal)`` if ``x`` is ``S_G`` or ``J_G``.

    Every matrix unit must be either inside ``x`` or orthogonal to it; the
    units inside must then span ``x`` and include all diagonal units (system)
    or none of them (traceless).  ``marginal`` is true when some decision fell
    in the guard band.
    """
    n = x.n
    units = np.eye(n * n, dtype=complex).reshape(n * n, n, n)
    inside = x.outside_norm(units) if x.dim else np.ones(n * n)
    along = x.component_norm(units) if x.dim else np.zeros(n * n)
    member = inside <= REL_LOOSE
    orth = along <= REL_LOOSE
    if np.any(member == orth):
        return None
    marginal = bool(np.any((inside > REL_TIGHT) & member) or np.any((along > REL_TIGHT) & orth))
    member = member.reshape(n, n)
    if int(member.sum()) != x.dim or np.any(member != member.T):
        return None
    diag = np.diag(member)
    if diag.all():
        form = "system"
    elif not diag.any():
        form = "traceless"
    else:
        return None
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if member[i, j]]
    return Graph.from_edges(n, edges), form, marginal


__all__ = [
    "amplify",
    "as_traceless",
    "box_product",
    "categorical_product",
    "conjugate",
    "delta_matrix",
    "delta_space",
    "diagonal_span",
    "full_algebra",
    "kind_of",
    "offdiagonal_system",
    "permutation_matrix",
    "recognize_graph",
    "scalars",
    "span",
    "system_from_graph",
    "traceless_from_graph",
    "zero_space",
]
