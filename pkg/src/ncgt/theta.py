"""Theta numbers: classical Lovász theta and brackets for theta(S), theta-bar(J).

Both non-commutative numbers maximise ``||I + T||`` over ``I + T >= 0`` with
``T`` in an admissible space ``A``: ``A = S^perp`` for theta(S) and ``A = J``
for theta-bar(J).  Maximising a norm over a spectrahedron is not itself an
SDP, so general spaces get a bracket: the lower end comes from alternating
maximisation (fix a unit vector ``u``, solve the SDP for ``max u*(I+T)u``,
move ``u`` to the top eigenvector) and the upper end from
``min(n, chi-hat(A))`` or the classical number when ``A`` is graph-derived.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._seeding import substream
from .graphs import Graph, complement
from .linalg import (
    DimensionError,
    InvariantError,
    MatrixSubspace,
    adjoint,
    hs_norm,
    identity_defect,
    trace_defect,
)
from .ncgraph import amplify, recognize_graph
from .sdp import SdpProblem, solve_sdp

TOL_WITNESS = 1e-8
TOL_WITNESS_PSD = 1e-7
MONOTONE_SLACK = 1e-7
DEFAULT_BUDGET = 50


@dataclass
class ThetaBracket:
    lower: float
    upper: float
    witness_T: np.ndarray = field(repr=False)
    method: str = ""
    exact: bool = False

    @property
    def width(self) -> float:
        return self.upper - self.lower


# --------------------------------------------------------------------------
# classical theta


def _lovasz(g: Graph):
    """``(theta(G), Z, A)``: value, the optimal dual matrix and the primal matrix.

    Minimises ``lambda_max(A)`` over symmetric ``A`` with ones on the diagonal
    and on non-edges and free entries on edges; written as maximising ``-t``
    subject to ``t I - A >= 0``.
    """
    n = g.n
    if n == 0:
        return 0.0, np.zeros((0, 0)), np.zeros((0, 0))
    edges = g.sorted_edges()
    ones = np.ones((n, n))
    for i, j in edges:
        ones[i, j] = ones[j, i] = 0.0
    mats = [np.eye(n)]
    for i, j in edges:
        s = np.zeros((n, n))
        s[i, j] = s[j, i] = -1.0
        mats.append(s)
    prob = SdpProblem(c=np.r_[-1.0, np.zeros(len(edges))], F0=-ones, F=np.array(mats))
    t0 = float(np.linalg.eigvalsh(ones)[-1]) + 1.0
    sol = solve_sdp(prob, x0=np.r_[t0, np.zeros(len(edges))], tol_gap=1e-9)
    if sol.status != "optimal":
        raise RuntimeError(f"Lovász SDP ended with status {sol.status}")
    a = ones.copy()
    for (i, j), x in zip(edges, sol.x[1:]):
        a[i, j] = a[j, i] = x
    # lambda_max of a feasible A is a certified upper bound
    value = float(np.linalg.eigvalsh(a)[-1])
    return value, np.real(sol.dual), a


def theta_classical(g: Graph) -> float:
    return _lovasz(g)[0]


# --------------------------------------------------------------------------
# admissible spaces


def hermitian_basis(space: MatrixSubspace) -> np.ndarray:
    """Real-orthonormal basis (under ``Re tr(B*A)``) of the Hermitian matrices in ``space``."""
    n, k = space.n, space.dim
    if k == 0:
        return np.zeros((0, n, n), dtype=complex)
    b = space.basis
    # real coordinates (a, c) of sum (a_k + i c_k) b_k; Hermitian iff the skew part vanishes
    gens = np.concatenate([b, 1j * b])
    skew = (gens - adjoint(gens)).reshape(2 * k, -1)
    real_map = np.concatenate([skew.real, skew.imag], axis=1).T
    _, sv, vh = np.linalg.svd(real_map, full_matrices=True)
    rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0] if len(sv) else 1.0)))
    null = vh[rank:]
    herm = np.tensordot(null, gens, axes=1)
    herm = (herm + adjoint(herm)) / 2
    flat = herm.reshape(len(herm), -1)
    real_flat = np.concatenate([flat.real, flat.imag], axis=1)
    q, _ = np.linalg.qr(real_flat.T)
    q = q.T[: len(herm)]
    out = (q[:, : n * n] + 1j * q[:, n * n:]).reshape(-1, n, n)
    return (out + adjoint(out)) / 2


def _check_admissible(space: MatrixSubspace):
    if trace_defect(space) > 1e-9:
        raise InvariantError("the admissible space must be traceless (else the theta value is unbounded)")


def validate_theta_witness(space: MatrixSubspace, t, value: float | None = None,
                           tol: float = TOL_WITNESS) -> float:
    """Check ``t`` is an admissible witness; return ``||I + t||``.

    ``space`` is the admissible space (``S^perp`` or ``J``).
    """
    t = np.asarray(t, dtype=complex)
    if t.shape != (space.n, space.n):
        raise DimensionError("witness has the wrong size")
    resid = float(space.outside_norm(t)) if space.dim else hs_norm(t)
    if resid > tol * max(1.0, hs_norm(t)):
        raise InvariantError(f"witness leaves the admissible space (residual {resid:.2e})")
    if hs_norm(t - adjoint(t)) > tol * max(1.0, hs_norm(t)):
        raise InvariantError("witness is not Hermitian")
    w = np.linalg.eigvalsh((np.eye(space.n) + t + adjoint(np.eye(space.n) + t)) / 2)
    if w[0] < -TOL_WITNESS_PSD:
        raise InvariantError(f"I + T is not positive semidefinite (min eigenvalue {w[0]:.2e})")
    norm = float(w[-1])
    if value is not None and abs(norm - value) > TOL_WITNESS_PSD:
        raise InvariantError(f"witness norm {norm} disagrees with reported value {value}")
    return norm


def _fixed_u_step(herm: np.ndarray, u: np.ndarray):
    """Solve ``max u*(I+T)u`` over ``T = sum x_k H_k`` with ``I + T >= 0``; return T."""
    n = herm.shape[1]
    c = np.real(np.einsum("a,kab,b->k", u.conj(), herm, u))
    prob = SdpProblem(c=c, F0=np.eye(n), F=herm)
    sol = solve_sdp(prob, x0=np.zeros(len(herm)), tol_gap=1e-9)
    if sol.status not in ("optimal", "max_iter"):
        raise RuntimeError(f"theta subproblem ended with status {sol.status}")
    t = np.tensordot(sol.x, herm, axes=1)
    return (t + adjoint(t)) / 2


def _top(t: np.ndarray):
    w, v = np.linalg.eigh(np.eye(len(t)) + t)
    return float(w[-1]), v[:, -1]


def alternating_maximisation(herm: np.ndarray, u0, max_rounds: int = 40, tol: float = 1e-9):
    """Run the fixed-``u`` / top-eigenvector alternation; return ``(value, T, history)``."""
    u = np.asarray(u0, dtype=complex)
    u = u / np.linalg.norm(u)
    history = []
    best_t = np.zeros(herm.shape[1:], dtype=complex)
    best = 1.0
    for _ in range(max_rounds):
        t = _fixed_u_step(herm, u)
        value, u = _top(t)
        if history and value < history[-1] - MONOTONE_SLACK:
            raise AssertionError("alternating maximisation decreased the objective")
        history.append(value)
        if value > best:
            best, best_t = value, t
        if len(history) > 1 and history[-1] - history[-2] < tol:
            break
    return best, best_t, history


def _starts(n: int, budget: int, seed, extra=()):
    for u in extra:
        yield np.asarray(u, dtype=complex)
    for i in range(n):
        yield np.eye(n, dtype=complex)[i]
    yield np.ones(n, dtype=complex)
    for k in range(max(0, budget - n - 1 - len(extra))):
        rng = substream(seed, "theta-start", k)
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        yield z


def theta_admissible(space: MatrixSubspace, budget: int = DEFAULT_BUDGET, seed=None,
                     strong_chi_upper: float | None = None) -> ThetaBracket:
    """Bracket ``sup ||I+T||`` over ``I + T >= 0``, ``T`` in the traceless space ``space``."""
    _check_admissible(space)
    n = space.n
    upper = float(n)
    method = ["trace bound n"]
    seeds = []
    recog = recognize_graph(space)
    exact_by_graph = False
    if recog is not None and recog[1] == "traceless" and not recog[2]:
        # A = J_H, so the value is theta of the complement of H
        value, z, a = _lovasz(complement(recog[0]))
        upper = min(upper, value)
        d = np.sqrt(np.clip(np.diag(z), 0.0, None))
        if np.linalg.norm(d) > 0:
            seeds.append(d)
        method.append("graph-derived: classical theta")
        exact_by_graph = True
    if strong_chi_upper is not None and strong_chi_upper < upper:
        upper = float(strong_chi_upper)
        method.append("chi-hat upper bound")
    herm = hermitian_basis(space)
    best, best_t = 1.0, np.zeros((n, n), dtype=complex)
    if len(herm):
        for u in _starts(n, budget, seed, seeds):
            value, t, _ = alternating_maximisation(herm, u)
            if value > best:
                best, best_t = value, t
            if best >= upper - 1e-7:
                break
    lower = validate_theta_witness(space, best_t)
    # the witness is a feasible point, so its value is certified; rounding in
    # the upper bound must not put it above
    upper = max(upper, lower)
    exact = exact_by_graph or upper - lower <= 1e-6
    return ThetaBracket(lower=lower, upper=upper, witness_T=best_t, method="; ".join(method), exact=exact)


def theta_system(s: MatrixSubspace, budget: int = DEFAULT_BUDGET, seed=None) -> ThetaBracket:
    if identity_defect(s) > 1e-9:
        raise InvariantError("theta(S) needs an operator system (identity in S)")
    return theta_admissible(s.perp(), budget, seed, _strong_chi_upper(s.perp()))


def theta_bar(j: MatrixSubspace, budget: int = DEFAULT_BUDGET, seed=None) -> ThetaBracket:
    _check_admissible(j)
    return theta_admissible(j, budget, seed, _strong_chi_upper(j))


def theta_d(x: MatrixSubspace, d: int, budget: int = DEFAULT_BUDGET, seed=None,
            bar: bool | None = None) -> ThetaBracket:
    """theta or theta-bar of ``M_d(x)``; ``bar`` defaults to ``x`` not containing the identity."""
    if bar is None:
        bar = identity_defect(x) > 1e-9
    amp = amplify(x, d)
    return theta_bar(amp, budget, seed) if bar else theta_system(amp, budget, seed)


def embed_theta_witness(t, d: int) -> np.ndarray:
    """``E_11 (x) T``: a witness for ``M_d`` with the same norm ``||I + T||``."""
    e = np.zeros((d, d), dtype=complex)
    e[0, 0] = 1.0
    return np.kron(e, np.asarray(t, dtype=complex))


def _strong_chi_upper(space: MatrixSubspace):
    from .parameters import probe_strong_chi_upper

    up = probe_strong_chi_upper(space)
    return None if up is None or not np.isfinite(up) else up
