"""Homomorphisms between traceless spaces, in Kraus and isometry form.

A cptp map with Kraus operators ``E_i`` is a homomorphism ``J -> K`` when
``E_i J E_j*`` lies in ``K`` for all ``i, j``.  Stacking the ``E_i`` gives
an isometry ``E : C^n -> C^d (x) C^m`` (block ``i`` is ``E_i``, so index
``i * m + a``) with ``E J E*`` inside ``M_d (x) K``, matching
:func:`ncgt.ncgraph.amplify`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._search import volume
from .graphs import Graph
from .linalg import TOL_ORTH, DimensionError, InvariantError, MatrixSubspace, adjoint
from .ncgraph import amplify
from .parameters import Colouring, chi0_estimate

VOLUME_THRESHOLD = 1e-8


@dataclass(eq=False)
class KrausMap:
    n_in: int
    n_out: int
    kraus: np.ndarray

    def __post_init__(self):
        self.kraus = np.asarray(self.kraus, dtype=complex).reshape(-1, self.n_out, self.n_in)

    @property
    def r(self) -> int:
        return len(self.kraus)

    def tp_defect(self) -> float:
        total = np.einsum("kab,kac->bc", self.kraus.conj(), self.kraus)
        return float(np.max(np.abs(total - np.eye(self.n_in)))) if self.n_in else 0.0

    def check_tp(self, tol: float = TOL_ORTH) -> None:
        d = self.tp_defect()
        if d > tol:
            raise InvariantError(f"Kraus operators are not trace preserving (defect {d:.2e})")

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return np.einsum("kab,bc,kdc->ad", self.kraus, x, self.kraus.conj())


@dataclass(eq=False)
class IsometryCertificate:
    d: int
    E: np.ndarray

    def __post_init__(self):
        self.E = np.asarray(self.E, dtype=complex)
        if self.E.shape[0] % self.d:
            raise DimensionError("isometry rows must be a multiple of d")

    @property
    def n_in(self) -> int:
        return self.E.shape[1]

    @property
    def n_out(self) -> int:
        return self.E.shape[0] // self.d

    def check(self, tol: float = TOL_ORTH) -> None:
        defect = np.max(np.abs(adjoint(self.E) @ self.E - np.eye(self.n_in))) if self.n_in else 0.0
        if defect > tol:
            raise InvariantError(f"E*E differs from the identity by {defect:.2e}")


def verify_hom(k: KrausMap, j: MatrixSubspace, t: MatrixSubspace, tol: float = TOL_ORTH):
    """Return ``(ok, max_residual)`` for ``E_a J E_b* subset t``; raises on a TP defect."""
    if j.n != k.n_in or t.n != k.n_out:
        raise DimensionError(f"map M_{k.n_in} -> M_{k.n_out} against spaces in M_{j.n}, M_{t.n}")
    k.check_tp()
    if j.dim == 0 or k.r == 0:
        return True, 0.0
    imgs = np.einsum("aij,bjk,clk->abcil", k.kraus, j.basis, k.kraus.conj())
    imgs = imgs.reshape(-1, t.n, t.n)
    scale = np.maximum(1.0, np.linalg.norm(imgs.reshape(len(imgs), -1), axis=1))
    resid = np.asarray(t.outside_norm(imgs)) / scale
    worst = float(np.max(resid))
    return worst <= tol, worst


def kraus_to_isometry(k: KrausMap) -> IsometryCertificate:
    k.check_tp()
    cert = IsometryCertificate(k.r, k.kraus.reshape(k.r * k.n_out, k.n_in))
    cert.check()
    return cert


def isometry_to_kraus(c: IsometryCertificate) -> KrausMap:
    c.check()
    return KrausMap(c.n_in, c.n_out, c.E.reshape(c.d, c.n_out, c.n_in))


def partial_trace(x, d: int, n: int) -> np.ndarray:
    """Trace out the first (``M_d``) factor of ``x`` in ``M_d (x) M_n``."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (d * n, d * n):
        raise DimensionError(f"{x.shape} does not factor as ({d}*{n})^2")
    return np.einsum("kakb->ab", x.reshape(d, n, d, n))


# --------------------------------------------------------------------------
# constructions


def identity_map(n: int) -> KrausMap:
    """Inclusion ``J -> K`` for ``J`` inside ``K``."""
    return KrausMap(n, n, np.eye(n, dtype=complex)[None])


def unitary_map(u) -> KrausMap:
    u = np.asarray(u, dtype=complex)
    return KrausMap(len(u), len(u), u[None])


def embed_amplify(n: int, d: int) -> KrausMap:
    """``X -> (1/d) 1 (x) X`` with Kraus operators ``(e_k (x) I_n) / sqrt(d)``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    ops = [np.kron(np.eye(d)[:, [k]], np.eye(n)) / np.sqrt(d) for k in range(d)]
    return KrausMap(n, d * n, np.array(ops))


def partial_trace_map(n: int, d: int) -> KrausMap:
    """``M_d (x) M_n -> M_n``, Kraus operators ``e_k* (x) I_n``."""
    ops = [np.kron(np.eye(d)[[k], :], np.eye(n)) for k in range(d)]
    return KrausMap(d * n, n, np.array(ops))


def partial_trace_second(n: int, m: int) -> KrausMap:
    """``M_n (x) M_m -> M_n`` tracing out the second factor; Kraus ``I_n (x) e_k*``."""
    ops = [np.kron(np.eye(n), np.eye(m)[[k], :]) for k in range(m)]
    return KrausMap(n * m, n, np.array(ops))


def box_left_embedding(n: int, w) -> KrausMap:
    """``X -> X (x) w_1 w_1* / |w_1|^2`` into ``(J box K)_{v,w}``."""
    w1 = np.asarray(w, dtype=complex).reshape(-1)
    w1 = w1 / np.linalg.norm(w1)
    return KrausMap(n, n * len(w1), np.kron(np.eye(n), w1[:, None])[None])


def box_right_embedding(m: int, v) -> KrausMap:
    """``Y -> v_1 v_1* / |v_1|^2 (x) Y`` into ``(J box K)_{v,w}``."""
    v1 = np.asarray(v, dtype=complex).reshape(-1)
    v1 = v1 / np.linalg.norm(v1)
    return KrausMap(m, len(v1) * m, np.kron(v1[:, None], np.eye(m))[None])


def graph_hom_map(g: Graph, h: Graph, f) -> KrausMap:
    """Kraus operators ``e_{f(k)} e_k*`` for a classical homomorphism ``f : G -> H``."""
    for i, j in g.edges:
        if not h.adjacent(f[i], f[j]):
            raise InvariantError(f"f does not map edge {(i, j)} to an edge")
    ops = np.zeros((g.n, h.n, g.n), dtype=complex)
    for k in range(g.n):
        ops[k, f[k], k] = 1.0
    return KrausMap(g.n, h.n, ops)


# --------------------------------------------------------------------------
# chi_0 witness transport


def transport_colouring(k: KrausMap, col: Colouring) -> Colouring:
    """Pull a minimal colouring of ``M_d (x) K`` back to ``J`` along ``k``.

    The vectors ``E* w_i`` span ``C^n``; walking the parts in order, a pulled
    back vector is kept when it is independent of everything kept so far
    (normalised volume at least ``1e-8``).  Kept vectors of part ``s`` span the
    filtration step ``V_s``; empty parts are dropped.
    """
    iso = kraus_to_isometry(k)
    if col.basis.shape[1] != iso.E.shape[0]:
        raise DimensionError("colouring does not live on the amplified target")
    pulled = col.basis @ iso.E.conj()  # row i is (E* w_i)^T
    kept: list[np.ndarray] = []
    parts = []
    for part in col.parts:
        mine = []
        for i in part:
            v = pulled[i]
            if np.linalg.norm(v) <= VOLUME_THRESHOLD:
                continue
            trial = np.array(kept + [v]).T
            if volume(trial) >= VOLUME_THRESHOLD:
                kept.append(v / np.linalg.norm(v))
                mine.append(len(kept) - 1)
        if mine:
            parts.append(tuple(mine))
    if len(kept) != k.n_in:
        raise InvariantError(f"pulled-back vectors span only {len(kept)} of {k.n_in} dimensions")
    return Colouring(np.array(kept), parts, "minimal")


@dataclass
class MonotonicityReport:
    hom_ok: bool
    residual: float
    source_upper: float
    target_upper: float
    transported_size: int

    @property
    def passed(self) -> bool:
        return self.hom_ok and 0 <= self.transported_size <= self.target_upper

    def to_json(self) -> dict:
        return {"pass": self.passed, "hom_ok": self.hom_ok, "residual": self.residual,
                "source_upper": self.source_upper, "target_upper": self.target_upper,
                "transported_size": self.transported_size}


def chi0_monotonicity(k: KrausMap, j: MatrixSubspace, t: MatrixSubspace, budget: int = 8,
                      seed=None) -> MonotonicityReport:
    """Check ``chi_0(J) <= chi_0(M_d (x) K)`` by transporting the target witness."""
    ok, resid = verify_hom(k, j, t)
    target = chi0_estimate(amplify(t, k.r), budget, seed)
    source = chi0_estimate(j, budget, seed)
    size = -1
    if ok and target.witness is not None:
        moved = transport_colouring(k, target.witness)
        moved.validate(j)
        size = moved.size
    return MonotonicityReport(ok, resid, source.upper, target.upper, size)


# --------------------------------------------------------------------------
# JSON


def certificate_to_json(c) -> dict:
    from .formats import matrix_to_json

    if isinstance(c, KrausMap):
        return {"kind": "kraus", "n_in": c.n_in, "n_out": c.n_out, "mats": [matrix_to_json(e) for e in c.kraus]}
    return {"kind": "isometry", "n_in": c.n_in, "n_out": c.n_out, "d": c.d, "mats": [matrix_to_json(c.E)]}


def certificate_from_json(obj: dict):
    from .formats import FormatError, matrix_from_json

    try:
        kind = obj["kind"]
        n_in, n_out = int(obj["n_in"]), int(obj["n_out"])
        mats = [matrix_from_json(m) for m in obj["mats"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad certificate: {exc}") from None
    if kind == "kraus":
        if any(m.shape != (n_out, n_in) for m in mats):
            raise DimensionError("Kraus operator shape disagrees with n_in/n_out")
        return KrausMap(n_in, n_out, np.array(mats) if mats else np.zeros((0, n_out, n_in)))
    if kind == "isometry":
        d = int(obj.get("d", 1))
        if len(mats) != 1 or mats[0].shape != (d * n_out, n_in):
            raise DimensionError("isometry certificate needs one (d*n_out) x n_in matrix")
        return IsometryCertificate(d, mats[0])
    raise FormatError(f"unknown certificate kind {kind!r}")


def as_kraus(c) -> KrausMap:
    return c if isinstance(c, KrausMap) else isometry_to_kraus(c)


def channel_distance(a: KrausMap, b: KrausMap) -> float:
    """Largest entrywise gap between the two channels on all matrix units."""
    n = a.n_in
    worst = 0.0
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1.0
            worst = max(worst, float(np.max(np.abs(a.apply(e) - b.apply(e)))))
    return worst


__all__ = [
    "IsometryCertificate",
    "KrausMap",
    "as_kraus",
    "box_left_embedding",
    "box_right_embedding",
    "certificate_from_json",
    "certificate_to_json",
    "channel_distance",
    "chi0_monotonicity",
    "embed_amplify",
    "graph_hom_map",
    "identity_map",
    "isometry_to_kraus",
    "kraus_to_isometry",
    "partial_trace",
    "partial_trace_map",
    "partial_trace_second",
    "transport_colouring",
    "unitary_map",
    "verify_hom",
]
