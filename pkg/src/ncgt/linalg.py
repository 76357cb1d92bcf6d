"""Dense complex matrices, Hilbert-Schmidt geometry and matrix subspaces.

Matrices are plain ``numpy`` complex arrays of shape ``(n, n)``.  Subspaces of
``M_n`` are :class:`MatrixSubspace` objects holding an HS-orthonormal basis as
an array of shape ``(k, n, n)``.

Kronecker convention used throughout the package: the pair of indices
``(i, k)`` of ``C^n (x) C^m`` maps to ``i * m + k`` (``numpy.kron`` order).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

TOL_ORTH = 1e-9
TOL_RANK = 1e-9
TOL_HERM = 1e-10
TOL_EIG = 1e-10

KINDS = ("system", "traceless", "plain")


class DimensionError(ValueError):
    """Operands live in different ambient dimensions."""


class InvariantError(ValueError):
    """A structural invariant (orthonormality, kind, unitarity) fails."""


class ConvergenceError(RuntimeError):
    """An iterative routine ran out of iterations."""


def as_matrix(a, n: int | None = None) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise DimensionError(f"expected a {n}x{n} matrix, got {m.shape[0]}x{m.shape[0]}")
    if not np.all(np.isfinite(m)):
        raise InvariantError("matrix has non-finite entries")
    return m


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    """``E_{i,j}`` in ``M_n`` (0-based indices)."""
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1.0
    return e


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``tr(b* a)``, linear in ``a``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(b, a))


def hs_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def is_hermitian(a: np.ndarray, tol: float = TOL_HERM) -> bool:
    scale = max(hs_norm(a), 1.0)
    return hs_norm(a - adjoint(a)) <= tol * scale


def hermitian_eig(a, tol: float = TOL_EIG, max_sweeps: int = 60):
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ``w`` sorted in descending order and the
    matching orthonormal eigenvectors as the columns of ``v``.
    """
    a = as_matrix(a)
    scale = hs_norm(a)
    if hs_norm(a - adjoint(a)) > TOL_HERM * max(scale, 1.0):
        raise InvariantError("hermitian_eig needs a Hermitian matrix")
    n = a.shape[0]
    h = (a + adjoint(a)) / 2
    v = np.eye(n, dtype=complex)
    if n == 1 or scale == 0.0:
        return _sorted_eig(np.real(np.diag(h)), v)

    # off-diagonal mass is driven well below tol so the reconstruction meets it
    target = 1e-3 * tol * scale
    for _ in range(max_sweeps):
        off = hs_norm(h - np.diag(np.diag(h)))
        if off <= target:
            return _sorted_eig(np.real(np.diag(h)), v)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = h[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                tau = (h[q, q].real - h[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                rot = np.array([[c, s * phase], [-s * np.conj(phase), c]])
                cols = [p, q]
                h[:, cols] = h[:, cols] @ rot
                h[cols, :] = adjoint(rot) @ h[cols, :]
                h[p, q] = h[q, p] = 0.0
                v[:, cols] = v[:, cols] @ rot
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")


def _sorted_eig(w: np.ndarray, v: np.ndarray):
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def random_unitary(n: int, seed=None) -> np.ndarray:
    """Haar-random unitary from the QR factorisation of a complex Ginibre matrix."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def fourier_vectors(n: int) -> np.ndarray:
    """Rows ``v_k = (1, z^k, z^{2k}, ...)/sqrt(n)`` with ``z = exp(2 pi i / n)``."""
    k = np.arange(n)
    return np.exp(2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


@dataclass(frozen=True, eq=False)
class OrthonormalFamily:
    """Ordered orthonormal vectors, stored as the rows of ``vectors``."""

    vectors: np.ndarray

    def __post_init__(self):
        vecs = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        if vecs.shape[0] > vecs.shape[1]:
            raise InvariantError("more vectors than the ambient dimension")
        gram = vecs.conj() @ vecs.T
        defect = np.max(np.abs(gram - np.eye(len(vecs)))) if len(vecs) else 0.0
        if defect > TOL_ORTH:
            raise InvariantError(f"family is not orthonormal (Gram defect {defect:.2e})")
        object.__setattr__(self, "vectors", vecs)

    @classmethod
    def from_columns(cls, u: np.ndarray) -> "OrthonormalFamily":
        return cls(np.asarray(u).T)

    @classmethod
    def standard(cls, n: int) -> "OrthonormalFamily":
        return cls(np.eye(n, dtype=complex))

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def is_full(self) -> bool:
        return len(self) == self.n


class MatrixSubspace:
    """A subspace of ``M_n`` with an HS-orthonormal basis.

    Build instances with :func:`span` (or the constructors in
    :mod:`ncgt.ncgraph`); the constructor trusts its arguments.
    """

    def __init__(self, n: int, basis: np.ndarray, kind: str = "plain"):
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        basis = np.asarray(basis, dtype=complex).reshape(-1, n, n)
        basis.setflags(write=False)
        self.n = n
        self.kind = kind
        self.basis = basis

    def __repr__(self):
        return f"MatrixSubspace(n={self.n}, dim={self.dim}, kind={self.kind!r})"

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def flat(self) -> np.ndarray:
        return self.basis.reshape(self.dim, self.n * self.n)

    def coefficients(self, x: np.ndarray) -> np.ndarray:
        """``<x, b_k>`` for every basis element; ``x`` may be a stack of matrices."""
        x = np.asarray(x, dtype=complex)
        return np.tensordot(x.reshape(*x.shape[:-2], -1), self.flat.conj(), axes=([-1], [1]))

    def project(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape[-2:] != (self.n, self.n):
            raise DimensionError(f"expected {self.n}x{self.n} matrices, got {x.shape}")
        c = self.coefficients(x)
        return np.tensordot(c, self.basis, axes=([-1], [0]))

    def component_norm(self, x) -> np.ndarray | float:
        """Norm of the projection onto this subspace (``0`` means ``x`` is orthogonal)."""
        c = self.coefficients(np.asarray(x, dtype=complex))
        return np.sqrt(np.sum(np.abs(c) ** 2, axis=-1))

    def outside_norm(self, x) -> np.ndarray | float:
        """Distance from ``x`` to the subspace, measured through the complement.

        Computing it as the projection onto ``perp`` avoids the cancellation in
        ``|x|^2 - |proj x|^2`` so membership can be decided at ``TOL_ORTH``.
        """
        return self.perp().component_norm(x)

    def contains(self, x, tol: float = TOL_ORTH) -> bool:
        return bool(self.outside_norm(x) <= tol * max(1.0, hs_norm(x)))

    @cached_property
    def _perp(self) -> "MatrixSubspace":
        size = self.n * self.n
        if self.dim == 0:
            comp = np.eye(size, dtype=complex)
        else:
            _, _, vh = np.linalg.svd(self.flat.conj(), full_matrices=True)
            comp = vh[self.dim:].conj()
        kind = {"system": "traceless", "traceless": "system"}.get(self.kind, "plain")
        out = MatrixSubspace(self.n, comp.reshape(-1, self.n, self.n), kind)
        out.__dict__["_perp"] = self
        return out

    def perp(self) -> "MatrixSubspace":
        return self._perp


def _gram_schmidt(vectors: np.ndarray, tol: float) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalisation pass; drops small residuals."""
    if len(vectors) == 0:
        return np.zeros((0, vectors.shape[-1]), dtype=complex)
    scale = max(float(np.max(np.linalg.norm(vectors, axis=1))), 0.0)
    if scale == 0.0:
        return np.zeros((0, vectors.shape[-1]), dtype=complex)
    out: list[np.ndarray] = []
    q = np.zeros((0, vectors.shape[-1]), dtype=complex)
    for g in vectors:
        r = g.astype(complex)
        for _ in range(2):
            if len(out):
                r = r - (q.conj() @ r) @ q
        nrm = np.linalg.norm(r)
        if nrm > tol * scale:
            out.append(r / nrm)
            q = np.array(out)
    return q


def span(mats: Iterable, kind: str = "plain", n: int | None = None) -> MatrixSubspace:
    """Orthonormalised span of ``mats`` under the HS inner product.

    ``kind`` other than ``"plain"`` is verified; violations raise
    :class:`InvariantError`.  ``n`` is required when ``mats`` is empty.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if mats:
        dims = {m.shape for m in mats}
        if len(dims) != 1:
            raise DimensionError(f"mixed shapes in span: {sorted(dims)}")
        m0 = mats[0]
        if m0.ndim != 2 or m0.shape[0] != m0.shape[1]:
            raise DimensionError(f"span needs square matrices, got {m0.shape}")
        if n is not None and m0.shape[0] != n:
            raise DimensionError("explicit n disagrees with the generators")
        n = m0.shape[0]
    elif n is None:
        raise ValueError("n is required for an empty spanning set")
    flat = np.array([m.reshape(-1) for m in mats]) if mats else np.zeros((0, n * n), complex)
    q = _gram_schmidt(flat, TOL_RANK)
    sub = MatrixSubspace(n, q.reshape(-1, n, n), kind)
    check_kind(sub, kind)
    return sub


def adjoint_defect(sub: MatrixSubspace) -> float:
    if sub.dim == 0:
        return 0.0
    return float(np.max(sub.outside_norm(adjoint(sub.basis))))


def identity_defect(sub: MatrixSubspace) -> float:
    return float(sub.outside_norm(np.eye(sub.n)) / np.sqrt(sub.n))


def trace_defect(sub: MatrixSubspace) -> float:
    if sub.dim == 0:
        return 0.0
    return float(np.max(np.abs(np.trace(sub.basis, axis1=1, axis2=2))))


def check_kind(sub: MatrixSubspace, kind: str, tol: float = TOL_ORTH) -> None:
    if kind == "plain":
        return
    if adjoint_defect(sub) > tol:
        raise InvariantError(f"{kind} space must be closed under adjoint")
    if kind == "system" and identity_defect(sub) > tol:
        raise InvariantError("operator system must contain the identity")
    if kind == "traceless" and trace_defect(sub) > tol:
        raise InvariantError("traceless space has an element with non-zero trace")


def infer_kind(sub: MatrixSubspace, tol: float = TOL_ORTH) -> str:
    if adjoint_defect(sub) > tol:
        return "plain"
    if identity_defect(sub) <= tol:
        return "system"
    if trace_defect(sub) <= tol:
        return "traceless"
    return "plain"


def with_kind(sub: MatrixSubspace, kind: str) -> MatrixSubspace:
    check_kind(sub, kind)
    return MatrixSubspace(sub.n, sub.basis, kind)


def project(x, v: MatrixSubspace) -> np.ndarray:
    return v.project(x)


def perp(v: MatrixSubspace) -> MatrixSubspace:
    return v.perp()


def tensor(a, b, kind: str | None = None):
    """Kronecker product of two matrices, or of two subspaces.

    For subspaces the result is the span of all pairwise products of basis
    elements; its kind is inferred unless given.
    """
    if isinstance(a, MatrixSubspace) and isinstance(b, MatrixSubspace):
        n = a.n * b.n
        prods = np.einsum("aij,bkl->abikjl", a.basis, b.basis).reshape(a.dim * b.dim, n, n)
        # Kronecker products of orthonormal bases are already orthonormal
        sub = MatrixSubspace(n, prods, "plain")
        return with_kind(sub, kind or infer_kind(sub))
    if isinstance(a, MatrixSubspace) or isinstance(b, MatrixSubspace):
        raise TypeError("tensor needs two matrices or two subspaces")
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def sum_space(parts: Sequence[MatrixSubspace], kind: str | None = None) -> MatrixSubspace:
    n = {p.n for p in parts}
    if len(n) != 1:
        raise DimensionError("summands live in different ambient dimensions")
    (n,) = n
    mats = [b for p in parts for b in p.basis]
    sub = span(mats, n=n)
    return with_kind(sub, kind or infer_kind(sub))


def subspace_distance(a: MatrixSubspace, b: MatrixSubspace) -> float:
    """Largest mutual projection residual between the two bases."""
    if a.n != b.n:
        raise DimensionError("subspaces in different ambient dimensions")
    worst = 0.0
    if a.dim:
        worst = max(worst, float(np.max(b.outside_norm(a.basis))))
    if b.dim:
        worst = max(worst, float(np.max(a.outside_norm(b.basis))))
    return worst


def same_subspace(a: MatrixSubspace, b: MatrixSubspace, tol: float = 1e-8) -> bool:
    return a.n == b.n and a.dim == b.dim and subspace_distance(a, b) <= tol
