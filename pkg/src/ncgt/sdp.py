"""A small dense semidefinite-programming solver.

Problems are in inequality form::

    maximize  c . x   subject to  F0 + sum_k x_k F_k  >= 0   (PSD)

with Hermitian ``F0, F_k``.  The solver follows the central path of the
log-det barrier ``c . x + mu * log det F(x)`` with damped Newton steps, and
shrinks ``mu`` until the barrier duality bound ``p * mu`` (``p`` the matrix
size) is below the requested gap.  At a centred point ``Z = mu F(x)^{-1}`` is
dual feasible, so the dual matrix comes for free.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import TOL_HERM, DimensionError, InvariantError, adjoint

TOL_GAP = 1e-8
TOL_PSD = 1e-9


@dataclass
class SdpProblem:
    c: np.ndarray
    F0: np.ndarray
    F: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        self.F0 = np.asarray(self.F0, dtype=complex)
        p = self.F0.shape[0]
        self.F = np.asarray(self.F, dtype=complex).reshape(-1, p, p)
        if self.F0.shape != (p, p):
            raise DimensionError("F0 must be square")
        if len(self.F) != len(self.c):
            raise DimensionError(f"{len(self.c)} objective entries but {len(self.F)} constraint matrices")
        for name, mats in (("F0", self.F0[None]), ("F", self.F)):
            if len(mats) and np.max(np.abs(mats - adjoint(mats))) > TOL_HERM * max(1.0, np.max(np.abs(mats))):
                raise InvariantError(f"{name} must be Hermitian")

    @property
    def m(self) -> int:
        return len(self.c)

    @property
    def p(self) -> int:
        return self.F0.shape[0]

    def matrix(self, x) -> np.ndarray:
        return self.F0 + np.tensordot(np.asarray(x, dtype=float), self.F, axes=1)


@dataclass
class SdpSolution:
    x: np.ndarray
    value: float
    barrier_mu: float
    min_eig: float
    status: str
    gap: float = float("nan")
    dual: np.ndarray | None = field(default=None, repr=False)
    newton_steps: int = 0


def _chol(a: np.ndarray):
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return None


def _logdet(chol: np.ndarray) -> float:
    return 2.0 * float(np.sum(np.log(np.real(np.diag(chol)))))


def _dual(prob: SdpProblem, x: np.ndarray, mu: float) -> np.ndarray:
    """Dual matrix at a nearly centred point, with the Newton correction applied.

    ``mu F^{-1}`` alone misses ``tr(Z F_k) = -c_k`` by the gradient, which is
    large in absolute terms when ``F`` is ill conditioned.  Subtracting
    ``mu F^{-1} D F^{-1}`` for the Newton step ``D`` removes that residual.
    """
    finv = np.linalg.inv(prob.matrix(x))
    if prob.m == 0:
        return mu * finv
    a = finv[None] @ prob.F
    grad = prob.c + mu * np.real(np.trace(a, axis1=1, axis2=2))
    q = np.real(a.reshape(prob.m, -1) @ np.swapaxes(a, 1, 2).reshape(prob.m, -1).T)
    dx = np.linalg.lstsq(mu * (q + q.T) / 2, grad, rcond=None)[0]
    z = mu * (finv - finv @ np.tensordot(dx, prob.F, axes=1) @ finv)
    z = (z + adjoint(z)) / 2
    return z if _min_eig(z) >= -TOL_PSD * max(1.0, float(np.max(np.abs(z)))) else mu * finv


def _barrier(prob: SdpProblem, x: np.ndarray, tol_gap: float, mu: float, shrink: float,
             max_newton: int, stop=None):
    """Central-path following from a strictly feasible ``x``; returns (x, mu, steps, status, dual)."""
    c, F = prob.c, prob.F
    p, m = prob.p, prob.m
    steps = 0
    while True:
        # centring
        while True:
            fx = prob.matrix(x)
            L = _chol(fx)
            if L is None:
                raise RuntimeError("barrier iterate left the PSD cone")
            finv = np.linalg.inv(fx)
            if m == 0:
                break
            a = finv[None] @ F
            grad = c + mu * np.real(np.trace(a, axis1=1, axis2=2))
            af = a.reshape(m, -1)
            at = np.swapaxes(a, 1, 2).reshape(m, -1)
            q = np.real(af @ at.T)
            q = (q + q.T) / 2
            try:
                lq = np.linalg.cholesky(mu * q)
                dx = np.linalg.solve(lq.T, np.linalg.solve(lq, grad))
            except np.linalg.LinAlgError:
                dx = np.linalg.lstsq(mu * q, grad, rcond=None)[0]
            dec = float(grad @ dx)
            if dec <= 1e-12 * max(1.0, mu):
                break
            # compare increments, not absolute objective values, so the
            # test stays meaningful once mu is far below c . x
            ld0 = _logdet(L)
            t = 1.0
            while True:
                xt = x + t * dx
                Lt = _chol(prob.matrix(xt))
                if Lt is not None and t * float(c @ dx) + mu * (_logdet(Lt) - ld0) >= 0.25 * t * dec:
                    break
                t *= 0.5
                if t < 1e-14:
                    break
            if t < 1e-14:
                break
            x = xt
            steps += 1
            if np.max(np.abs(x)) > 1e10:
                return x, mu, steps, "unbounded", None
            if stop is not None and stop(x):
                return x, mu, steps, "stopped", _dual(prob, x, mu)
            if steps >= max_newton:
                return x, mu, steps, "max_iter", _dual(prob, x, mu)
        if stop is not None and stop(x):
            return x, mu, steps, "stopped", _dual(prob, x, mu)
        if p * mu <= tol_gap:
            return x, mu, steps, "optimal", _dual(prob, x, mu)
        mu /= shrink


def _min_eig(a: np.ndarray) -> float:
    return float(np.linalg.eigvalsh((a + adjoint(a)) / 2)[0])


def solve_sdp(prob: SdpProblem, x0=None, tol_gap: float = TOL_GAP, mu0: float | None = None,
              shrink: float = 5.0, max_newton: int = 2000) -> SdpSolution:
    """Solve ``prob``; phase I runs when ``x0`` (default 0) is not strictly feasible."""
    x = np.zeros(prob.m) if x0 is None else np.asarray(x0, dtype=float).copy()
    steps = 0
    if _chol(prob.matrix(x)) is None or _min_eig(prob.matrix(x)) <= 0:
        x, steps, ok = _phase_one(prob, x, tol_gap)
        if not ok:
            return SdpSolution(x, float("nan"), float("nan"), _min_eig(prob.matrix(x)), "infeasible",
                               newton_steps=steps)
    if mu0 is None:
        mu0 = max(1.0, float(np.max(np.abs(prob.c))) if prob.m else 1.0)
    x, mu, more, status, dual = _barrier(prob, x, tol_gap, mu0, shrink, max_newton)
    return SdpSolution(
        x=x,
        value=float(prob.c @ x),
        barrier_mu=mu,
        min_eig=_min_eig(prob.matrix(x)),
        status=status,
        gap=prob.p * mu,
        dual=dual,
        newton_steps=steps + more,
    )


def _phase_one(prob: SdpProblem, x: np.ndarray, tol_gap: float):
    """Maximise ``s`` subject to ``F(x) - s I >= 0``; stop once ``s`` is safely positive."""
    p, m = prob.p, prob.m
    s0 = _min_eig(prob.matrix(x)) - 1.0
    # Diagonal tail blocks: s <= 1 and the box |x_k| <= R.  Without them the
    # auxiliary barrier can lack a centre (log det grows along a flat direction).
    radius = 1e4 * max(1.0, float(np.max(np.abs(x))) if m else 1.0)
    q = p + 1 + 2 * m
    f0 = np.zeros((q, q), dtype=complex)
    f0[:p, :p] = prob.F0
    f0[p, p] = 1.0
    tail = np.arange(p + 1, q)
    f0[tail, tail] = radius
    fs = np.zeros((m + 1, q, q), dtype=complex)
    fs[:m, :p, :p] = prob.F
    for k in range(m):
        fs[k, p + 1 + 2 * k, p + 1 + 2 * k] = 1.0
        fs[k, p + 2 + 2 * k, p + 2 + 2 * k] = -1.0
    fs[m, :p, :p] = -np.eye(p)
    fs[m, p, p] = -1.0
    aux = SdpProblem(c=np.r_[np.zeros(m), 1.0], F0=f0, F=fs)
    scale = max(1.0, float(np.max(np.abs(prob.F0))))
    margin = 1e-6 * scale
    z, _, steps, status, _ = _barrier(aux, np.r_[x, s0], tol_gap, 1.0, 5.0, 2000,
                                      stop=lambda z: z[-1] > margin)
    feasible = z[-1] > 0 and _min_eig(prob.matrix(z[:m])) > 0
    return z[:m], steps, feasible


def problem_to_json(prob: SdpProblem) -> dict:
    from .formats import matrix_to_json

    return {
        "m": prob.m,
        "c": [float(v) for v in prob.c],
        "F0": matrix_to_json(prob.F0),
        "F": [matrix_to_json(f) for f in prob.F],
    }


def problem_from_json(obj: dict) -> SdpProblem:
    from .formats import matrix_from_json

    f0 = matrix_from_json(obj["F0"])
    mats = [matrix_from_json(f) for f in obj["F"]]
    prob = SdpProblem(c=obj["c"], F0=f0, F=np.array(mats) if mats else np.zeros((0, *f0.shape)))
    if prob.m != obj["m"]:
        raise DimensionError("'m' disagrees with the number of constraint matrices")
    return prob


def solution_to_json(sol: SdpSolution) -> dict:
    return {
        "x": [float(v) for v in sol.x],
        "value": sol.value,
        "barrier_mu": sol.barrier_mu,
        "min_eig": sol.min_eig,
        "status": sol.status,
        "gap": sol.gap,
    }
