"""Levenberg-Marquardt search for bases realising an orthogonality pattern.

Given a subspace ``X`` with orthonormal basis ``b_k`` and a set of ordered
index pairs ``(i, j)``, drive every coefficient ``<v_i v_j*, b_k>`` to zero.
With ``V`` holding the vectors as columns these are the entries
``(V* b_k* V)_{j i}``.  Steps move ``V -> V (I + G)``; in unitary mode ``G``
is skew-Hermitian (off-diagonal generators, Cayley retraction), in general
mode ``G`` is arbitrary and columns are renormalised afterwards.
"""

from __future__ import annotations

import numpy as np

from .linalg import adjoint

TARGET = 1e-24
MIN_VOLUME = 1e-6


def volume(vecs: np.ndarray) -> float:
    """``sqrt det`` of the Gram matrix of the normalised columns (1 for orthonormal, 0 if dependent)."""
    v = vecs / np.linalg.norm(vecs, axis=0, keepdims=True)
    gram = adjoint(v) @ v
    return float(np.sqrt(max(np.real(np.linalg.det(gram)), 0.0)))


class PatternProblem:
    def __init__(self, basis: np.ndarray, pairs, mode: str = "unitary"):
        self.bconj = adjoint(np.asarray(basis, dtype=complex))
        self.n = self.bconj.shape[1] if len(self.bconj) else 0
        pairs = sorted(set((int(i), int(j)) for i, j in pairs))
        self.ii = np.array([i for i, _ in pairs], dtype=int)
        self.jj = np.array([j for _, j in pairs], dtype=int)
        self.mode = mode
        n = self.n
        if mode == "unitary":
            gens = []
            for p in range(n):
                for q in range(p + 1, n):
                    g = np.zeros((n, n), dtype=complex)
                    g[p, q], g[q, p] = 1.0, -1.0
                    gens.append(g)
                    h = np.zeros((n, n), dtype=complex)
                    h[p, q] = h[q, p] = 1j
                    gens.append(h)
            self.gens = np.array(gens).reshape(-1, n, n)
        else:
            units = np.eye(n * n, dtype=complex).reshape(n * n, n, n)
            self.gens = np.concatenate([units, 1j * units])

    def residual(self, v: np.ndarray) -> np.ndarray:
        m = adjoint(v)[None] @ self.bconj @ v[None]
        z = m[:, self.jj, self.ii].reshape(-1)
        return np.concatenate([z.real, z.imag])

    def jacobian(self, v: np.ndarray) -> np.ndarray:
        m = adjoint(v)[None] @ self.bconj @ v[None]
        # d(V* B V) along V -> V(I+G) is M G + G* M
        mg = np.einsum("kab,gbc->gkac", m, self.gens)
        gm = np.einsum("gba,kbc->gkac", self.gens.conj(), m)
        d = (mg + gm)[:, :, self.jj, self.ii].reshape(len(self.gens), -1)
        return np.concatenate([d.real, d.imag], axis=1).T

    def retract(self, v: np.ndarray, step: np.ndarray) -> np.ndarray:
        g = np.tensordot(step, self.gens, axes=1)
        n = self.n
        if self.mode == "unitary":
            eye = np.eye(n)
            return v @ np.linalg.solve(eye - g / 2, eye + g / 2)
        out = v @ (np.eye(n) + g)
        return out / np.linalg.norm(out, axis=0, keepdims=True)


def levenberg_marquardt(prob: PatternProblem, v0: np.ndarray, max_iter: int = 100):
    """Minimise ``|residual|^2`` from ``v0``; return ``(V, F)``."""
    v = np.asarray(v0, dtype=complex)
    if len(prob.ii) == 0 or len(prob.bconj) == 0:
        return v, 0.0
    r = prob.residual(v)
    f = float(r @ r)
    lam = 1e-3
    stall = 0
    for _ in range(max_iter):
        if f <= TARGET:
            break
        jac = prob.jacobian(v)
        jtj = jac.T @ jac
        grad = jac.T @ r
        diag = np.diag(jtj).copy()
        improved = False
        while lam < 1e12:
            a = jtj + lam * (np.diag(diag) + np.eye(len(diag)))
            try:
                step = -np.linalg.solve(a, grad)
            except np.linalg.LinAlgError:
                lam *= 4
                continue
            vt = prob.retract(v, step)
            if prob.mode != "unitary" and volume(vt) < MIN_VOLUME:
                lam *= 4
                continue
            rt = prob.residual(vt)
            ft = float(rt @ rt)
            if ft < f:
                stall = stall + 1 if ft > 0.999 * f else 0
                v, r, f = vt, rt, ft
                lam = max(lam / 3, 1e-12)
                improved = True
                break
            lam *= 4
        if not improved or stall >= 10:
            break
    return v, f
