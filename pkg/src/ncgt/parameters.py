"""Independence, clique and chromatic parameters of matrix subspaces.

Every parameter is a sup or inf over bases of ``C^n``.  Estimates combine

* probe bases (standard, Fourier, a few Haar unitaries): a probe ``v`` gives
  the distinguishability graph ``G_v`` (``v_i v_j*`` orthogonal to ``X``) and
  the confusability graph ``H_v`` (``v_i v_j*`` inside ``X``).  Cliques of
  ``G_v`` are independent sets, colourings of the complement of ``G_v`` are
  colourings, and since ``X`` contains a unitary copy of ``J_{H_v}``,
  ``alpha(X) <= alpha(H_v)`` and every chromatic-type number is at least
  ``chi(H_v)``;
* a Levenberg-Marquardt basis search (:mod:`ncgt._search`) that tries to
  realise one more independent vector or one fewer colour;
* exact classical values when ``X`` is recognised as ``S_G`` or ``J_G``.

Bounds and witnesses only use relations that hold at the tight threshold;
relations in the guard band mark the estimate as marginal and block the
exact flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._search import PatternProblem, levenberg_marquardt, volume
from ._seeding import parallel_map, substream
from .graphs import (
    Graph,
    complement,
    maximum_clique,
    optimal_colouring,
)
from .linalg import (
    TOL_ORTH,
    DimensionError,
    InvariantError,
    MatrixSubspace,
    OrthonormalFamily,
    fourier_vectors,
    identity_defect,
    random_unitary,
    trace_defect,
)
from .ncgraph import REL_LOOSE, REL_TIGHT, amplify, recognize_graph

DEFAULT_BUDGET = 64
SEARCH_SUCCESS = 1e-20
MIN_VOLUME = 1e-8
RANDOM_PROBES = 2
MAX_PROFILES = 3
INF = math.inf


# --------------------------------------------------------------------------
# relations and derived graphs


def _rows(fam) -> np.ndarray:
    if isinstance(fam, OrthonormalFamily):
        return fam.vectors
    return np.atleast_2d(np.asarray(fam, dtype=complex))


def _products(vecs: np.ndarray) -> np.ndarray:
    """``P[i, j] = v_i v_j*`` for normalised rows ``v_i``."""
    v = vecs / np.linalg.norm(vecs, axis=1, keepdims=True)
    return np.einsum("ia,jb->ijab", v, v.conj())


@dataclass
class RelationModel:
    """Residuals of every rank-one product ``v_i v_j*`` against a subspace.

    ``orth[i, j]`` is the norm of its projection onto ``X`` (zero means
    orthogonal) and ``member[i, j]`` its distance to ``X``.
    """

    orth: np.ndarray
    member: np.ndarray

    @classmethod
    def build(cls, x: MatrixSubspace, fam) -> "RelationModel":
        vecs = _rows(fam)
        if vecs.shape[1] != x.n:
            raise DimensionError(f"vectors of length {vecs.shape[1]} against M_{x.n}")
        prods = _products(vecs)
        return cls(np.asarray(x.component_norm(prods)), np.asarray(x.outside_norm(prods)))

    def _graph(self, res: np.ndarray, tol: float) -> Graph:
        ok = (res <= tol) & (res.T <= tol)
        k = len(res)
        return Graph.from_edges(k, [(i, j) for i in range(k) for j in range(i + 1, k) if ok[i, j]])

    def distinguishability(self, tol: float = REL_TIGHT) -> Graph:
        return self._graph(self.orth, tol)

    def confusability(self, tol: float = REL_TIGHT) -> Graph:
        return self._graph(self.member, tol)

    def diagonal_orthogonal(self, tol: float = REL_TIGHT) -> bool:
        return bool(np.all(np.diag(self.orth) <= tol))

    @property
    def marginal(self) -> bool:
        off = ~np.eye(len(self.orth), dtype=bool)
        band = lambda r: (r > REL_TIGHT) & (r <= REL_LOOSE)  # noqa: E731
        return bool(np.any(band(self.orth) & off) or np.any(band(self.member) & off)
                    or np.any(band(np.diag(self.orth))))


def distinguishability_graph(x: MatrixSubspace, v, tol: float = REL_TIGHT) -> Graph:
    """``G_v``: ``i ~ j`` iff ``v_i v_j*`` is orthogonal to ``x``."""
    return RelationModel.build(x, v).distinguishability(tol)


def confusability_graph(x: MatrixSubspace, v, tol: float = REL_TIGHT) -> Graph:
    """``H_v``: ``i ~ j`` iff ``v_i v_j*`` lies in ``x``."""
    return RelationModel.build(x, v).confusability(tol)


def is_independent_set(x: MatrixSubspace, fam, strong: bool = False, tol: float = TOL_ORTH):
    """Return ``(ok, max_violation)`` for the orthogonality relations of ``fam``."""
    if not isinstance(fam, OrthonormalFamily):
        fam = OrthonormalFamily(fam)
    if fam.n != x.n:
        raise DimensionError(f"vectors of length {fam.n} against M_{x.n}")
    if len(fam) == 0:
        return True, 0.0
    orth = RelationModel.build(x, fam).orth
    mask = np.ones_like(orth, dtype=bool) if strong else ~np.eye(len(orth), dtype=bool)
    worst = float(np.max(orth[mask])) if mask.any() else 0.0
    return worst <= tol, worst


# --------------------------------------------------------------------------
# witnesses


MODES = ("weak", "strong", "minimal")


@dataclass(eq=False)
class Colouring:
    """A basis (rows) split into parts; see :meth:`validate` for the mode semantics."""

    basis: np.ndarray
    parts: tuple
    mode: str = "weak"

    def __post_init__(self):
        self.basis = np.atleast_2d(np.asarray(self.basis, dtype=complex))
        self.parts = tuple(tuple(int(i) for i in p) for p in self.parts)
        if self.mode not in MODES:
            raise ValueError(f"unknown colouring mode {self.mode!r}")
        n = self.basis.shape[1]
        if self.basis.shape[0] != n:
            raise InvariantError("a colouring needs a full basis (n vectors)")
        flat = sorted(i for p in self.parts for i in p)
        if flat != list(range(n)) or any(len(p) == 0 for p in self.parts):
            raise InvariantError("parts must partition the basis into non-empty classes")
        if self.mode == "minimal":
            if n and volume(self.basis.T) < MIN_VOLUME:
                raise InvariantError("basis is not linearly independent (volume below 1e-8)")
        else:
            OrthonormalFamily(self.basis)

    @property
    def size(self) -> int:
        return len(self.parts)

    def violation(self, x: MatrixSubspace) -> float:
        if x.n != self.basis.shape[1]:
            raise DimensionError("colouring and subspace live in different dimensions")
        orth = RelationModel.build(x, self.basis).orth
        worst = 0.0
        for part in self.parts:
            for i in part:
                for j in part:
                    if i == j and self.mode == "weak":
                        continue
                    worst = max(worst, float(orth[i, j]))
        return worst

    def validate(self, x: MatrixSubspace, tol: float = TOL_ORTH) -> float:
        worst = self.violation(x)
        if worst > tol:
            raise InvariantError(f"{self.mode} colouring fails (residual {worst:.2e})")
        return worst

    def to_json(self) -> dict:
        from .formats import vector_to_json

        return {"basis": [vector_to_json(v) for v in self.basis],
                "parts": [list(p) for p in self.parts], "mode": self.mode}

    @classmethod
    def from_json(cls, obj: dict) -> "Colouring":
        from .formats import vector_from_json

        return cls(np.array([vector_from_json(v) for v in obj["basis"]]), obj["parts"], obj.get("mode", "weak"))


@dataclass
class ParameterEstimate:
    lower: float
    upper: float
    exact: bool = False
    witness: object = field(default=None, repr=False)
    method: str = ""

    def __post_init__(self):
        if self.lower > self.upper:
            raise InvariantError(f"estimate has lower {self.lower} > upper {self.upper}")
        if self.exact and self.lower != self.upper:
            raise InvariantError("exact estimate with differing bounds")

    def to_json(self) -> dict:
        from .formats import vector_to_json

        def num(v):
            return None if v == INF else int(v)

        out = {"lower": num(self.lower), "upper": num(self.upper), "exact": self.exact, "method": self.method}
        if isinstance(self.witness, Colouring):
            out["witness"] = self.witness.to_json()
        elif isinstance(self.witness, OrthonormalFamily):
            out["witness"] = {"basis": [vector_to_json(v) for v in self.witness.vectors]}
        return out


# --------------------------------------------------------------------------
# probes and search


def _probes(n: int, seed, random_probes: int = RANDOM_PROBES):
    yield "standard", np.eye(n, dtype=complex)
    if n > 1:
        yield "fourier", fourier_vectors(n)
        for k in range(random_probes):
            yield f"haar{k}", random_unitary(n, substream(seed, "probe", k)).T


def _probe_models(x: MatrixSubspace, seed, random_probes: int = RANDOM_PROBES):
    return [(name, vecs, RelationModel.build(x, vecs)) for name, vecs in _probes(x.n, seed, random_probes)]


def _pairs_within(parts, diagonal: bool):
    out = []
    for part in parts:
        for i in part:
            for j in part:
                if i != j or diagonal:
                    out.append((i, j))
    return out


def _profiles(n: int, c: int, limit: int = MAX_PROFILES):
    """Part-size profiles for ``n`` vectors in ``c`` parts, most balanced first."""
    found = []

    def rec(rest, parts_left, cap, acc):
        if parts_left == 0:
            if rest == 0:
                found.append(tuple(acc))
            return
        for size in range(min(cap, rest - parts_left + 1), 0, -1):
            if size * parts_left < rest:
                break
            rec(rest - size, parts_left - 1, size, acc + [size])

    rec(n, c, n, [])
    found.sort(key=lambda p: (max(p) - min(p), p))
    return found[:limit]


def _contiguous(sizes):
    parts, start = [], 0
    for s in sizes:
        parts.append(tuple(range(start, start + s)))
        start += s
    return parts


def _search_pattern(x: MatrixSubspace, pairs, mode: str, starts: int, seed, tag):
    """Try ``starts`` random starts; return the column matrix of the first success."""
    prob = PatternProblem(x.basis, pairs, mode)

    def attempt(k):
        v0 = random_unitary(x.n, substream(seed, *tag, k))
        v, f = levenberg_marquardt(prob, v0)
        return v if f <= SEARCH_SUCCESS else None

    # batches keep the answer independent of the worker count
    batch = 4
    for first in range(0, starts, batch):
        for v in parallel_map(attempt, range(first, min(starts, first + batch))):
            if v is not None:
                return v
    return None


# --------------------------------------------------------------------------
# independence and clique numbers


def alpha_estimate(x: MatrixSubspace, budget: int = DEFAULT_BUDGET, seed=None) -> ParameterEstimate:
    n = x.n
    if n == 0:
        return ParameterEstimate(0, 0, True, OrthonormalFamily(np.zeros((0, 0))), "empty ambient space")
    recog = recognize_graph(x)
    if recog is not None and not recog[2]:
        g, form, _ = recog
        mis = maximum_clique(complement(g))
        fam = OrthonormalFamily(np.eye(n, dtype=complex)[mis])
        ok, _ = is_independent_set(x, fam)
        if not ok:
            raise InvariantError("graph-derived witness failed to validate")
        return ParameterEstimate(len(mis), len(mis), True, fam, f"graph-derived ({form}): exact alpha")
    lower, upper = 1, n
    witness = OrthonormalFamily(np.eye(n, dtype=complex)[:1])
    marginal = False
    method = ["probes"]
    for name, vecs, model in _probe_models(x, seed):
        marginal |= model.marginal
        clique = maximum_clique(model.distinguishability())
        if len(clique) > lower:
            lower, witness = len(clique), OrthonormalFamily(vecs[clique])
        upper = min(upper, len(maximum_clique(complement(model.confusability()))))
    s = lower + 1
    while s <= upper and budget > 0:
        pairs = [(i, j) for i in range(s) for j in range(s) if i != j]
        v = _search_pattern(x, pairs, "unitary", budget, seed, ("alpha", s))
        if v is None:
            break
        fam = OrthonormalFamily(v.T[:s])
        if not is_independent_set(x, fam)[0]:
            break
        lower, witness = s, fam
        method.append(f"search reached {s}")
        s += 1
    exact = lower == upper and not marginal
    if marginal:
        method.append("marginal relations")
    return ParameterEstimate(lower, upper, exact, witness, "; ".join(method))


def omega_estimate(x: MatrixSubspace, budget: int = DEFAULT_BUDGET, seed=None) -> ParameterEstimate:
    """``omega(X) = alpha(X^perp)``; the witness is a clique family for ``X``."""
    est = alpha_estimate(x.perp(), budget, seed)
    est.method = "alpha of the complement: " + est.method
    return est


# --------------------------------------------------------------------------
# chromatic numbers


def _colouring_from_graph(vecs: np.ndarray, g: Graph, mode: str) -> Colouring:
    """Colour ``complement(g)`` optimally; parts are cliques of ``g``."""
    col = optimal_colouring(complement(g))
    parts = [tuple(i for i in range(len(col)) if col[i] == c) for c in range(max(col) + 1)]
    return Colouring(vecs, parts, mode)


def _contains_identity(x: MatrixSubspace) -> bool:
    return identity_defect(x) <= 1e-9


def _chromatic(x: MatrixSubspace, mode: str, budget: int, seed, use_theta: bool = True) -> ParameterEstimate:
    n = x.n
    if n == 0:
        return ParameterEstimate(0, 0, True, None, "empty ambient space")
    if mode != "weak" and _contains_identity(x):
        # <v v*, I> = |v|^2, so no rank-one product can be orthogonal to X
        return ParameterEstimate(INF, INF, True, None, "identity in space: no strong colouring exists")
    recog = recognize_graph(x)
    if recog is not None and not recog[2]:
        g, form, _ = recog
        col = optimal_colouring(g)
        parts = [tuple(i for i in range(n) if col[i] == c) for c in range(max(col) + 1)]
        wit = Colouring(np.eye(n, dtype=complex), parts, mode)
        wit.validate(x)
        return ParameterEstimate(len(parts), len(parts), True, wit, f"graph-derived ({form}): exact chi")
    lower, upper, witness = 1, INF, None
    if mode == "weak":
        upper = n
        witness = Colouring(np.eye(n, dtype=complex), [(i,) for i in range(n)], "weak")
    method = ["probes"]
    marginal = False
    for name, vecs, model in _probe_models(x, seed):
        marginal |= model.marginal
        hv = model.confusability()
        lower = max(lower, max(optimal_colouring(hv)) + 1)
        if mode != "weak" and not model.diagonal_orthogonal():
            continue
        wit = _colouring_from_graph(vecs, model.distinguishability(), mode)
        if wit.size < upper:
            upper, witness = wit.size, wit
    if mode == "minimal":
        strong = _chromatic(x, "strong", budget, seed, use_theta=False)
        if strong.upper < upper:
            upper, witness = strong.upper, Colouring(strong.witness.basis, strong.witness.parts, "minimal")
        method.append("seeded by strong colouring")
    if mode == "strong" and use_theta and lower < upper and trace_defect(x) <= 1e-9:
        from .theta import theta_bar

        tb = theta_bar(x, budget=min(budget, 50), seed=seed)
        bound = math.ceil(tb.lower - 1e-6)
        if bound > lower:
            lower = bound
            method.append("theta-bar lower bound")
    c = (upper - 1) if upper != INF else n
    while c >= max(lower, 1) and budget > 0:
        found = None
        profiles = _profiles(n, c)
        for p, sizes in enumerate(profiles):
            parts = _contiguous(sizes)
            pairs = _pairs_within(parts, diagonal=mode != "weak")
            starts = max(1, budget // len(profiles))
            v = _search_pattern(x, pairs, "general" if mode == "minimal" else "unitary", starts, seed,
                                (mode, c, p))
            if v is None:
                continue
            try:
                wit = Colouring(v.T, parts, mode)
                wit.validate(x)
            except InvariantError:
                continue
            found = wit
            break
        if found is None:
            break
        upper, witness = c, found
        method.append(f"search reached {c}")
        c -= 1
    exact = lower == upper and not marginal
    if marginal:
        method.append("marginal relations")
    return ParameterEstimate(lower, upper, exact, witness, "; ".join(method))


def chi_estimate(x: MatrixSubspace, budget: int = DEFAULT_BUDGET, seed=None) -> ParameterEstimate:
    return _chromatic(x, "weak", budget, seed)


def strong_chi_estimate(x: MatrixSubspace, budget: int = DEFAULT_BUDGET, seed=None) -> ParameterEstimate:
    return _chromatic(x, "strong", budget, seed)


def chi0_estimate(x: MatrixSubspace, budget: int = DEFAULT_BUDGET, seed=None) -> ParameterEstimate:
    return _chromatic(x, "minimal", budget, seed)


def probe_strong_chi_upper(x: MatrixSubspace) -> float | None:
    """Cheapest strong-colouring bound: standard and Fourier probes only."""
    if x.n == 0 or _contains_identity(x):
        return None
    best = None
    for name, vecs, model in _probe_models(x, None, random_probes=0):
        if model.diagonal_orthogonal():
            size = _colouring_from_graph(vecs, model.distinguishability(), "strong").size
            best = size if best is None else min(best, size)
    return best


ESTIMATORS = {
    "alpha": alpha_estimate,
    "omega": omega_estimate,
    "chi": chi_estimate,
    "chihat": strong_chi_estimate,
    "chi0": chi0_estimate,
}


# --------------------------------------------------------------------------
# supports, sandwich, chi-hat * omega


def _perfect_matching(allowed: np.ndarray, fixed: dict) -> bool:
    """Kuhn's augmenting paths on the rows not in ``fixed``."""
    n = len(allowed)
    used_cols = set(fixed.values())
    match_col: dict[int, int] = {}

    def augment(i, seen):
        for j in range(n):
            if allowed[i, j] and j not in used_cols and j not in seen:
                seen.add(j)
                if j not in match_col or augment(match_col[j], seen):
                    match_col[j] = i
                    return True
        return False

    return all(augment(i, set()) for i in range(n) if i not in fixed)


def support_permutation(basis, tol_entry: float = 1e-9) -> list[int]:
    """Lexicographically smallest ``sigma`` with ``v_i[sigma(i)] != 0`` for every ``i``."""
    v = np.atleast_2d(np.asarray(basis, dtype=complex))
    n = v.shape[0]
    if v.shape != (n, n):
        raise DimensionError("support_permutation needs n vectors of length n")
    if n and volume(v.T) < MIN_VOLUME:
        raise InvariantError("vectors are not linearly independent")
    scale = max(1.0, float(np.max(np.abs(v)))) if n else 1.0
    for tol in (tol_entry, tol_entry * 1e-3):
        allowed = np.abs(v) > tol * scale
        fixed: dict[int, int] = {}
        if not _perfect_matching(allowed, fixed):
            continue
        for i in range(n):
            for j in range(n):
                if allowed[i, j] and j not in fixed.values():
                    fixed[i] = j
                    if _perfect_matching(allowed, fixed):
                        break
                    del fixed[i]
        return [fixed[i] for i in range(n)]
    raise InvariantError("no support permutation at any tolerance")


@dataclass
class CheckReport:
    passed: bool
    values: dict

    def to_json(self) -> dict:
        return {"pass": self.passed, **self.values}


def _num(v):
    return None if v == INF else (float(v) if isinstance(v, float) else v)


def sandwich_check(s: MatrixSubspace, d: int = 1, budget: int = DEFAULT_BUDGET, seed=None,
                   tol: float = 1e-6) -> CheckReport:
    """Check ``alpha_d(S) <= theta_d(S) <= chi-hat_d(S^perp)`` on the brackets."""
    from .theta import theta_system

    amp = amplify(s, d)
    a = alpha_estimate(amp, budget, seed)
    t = theta_system(amp, budget=min(budget, 50), seed=seed)
    c = strong_chi_estimate(amp.perp(), budget, seed)
    ok = a.lower <= t.upper + tol and t.lower <= c.upper + tol
    values = {
        "d": d,
        "alpha_lower": a.lower, "alpha_upper": a.upper,
        "theta_lower": t.lower, "theta_upper": t.upper,
        "chihat_lower": _num(c.lower), "chihat_upper": _num(c.upper),
        "exact": bool(a.exact and t.exact and c.exact),
    }
    return CheckReport(bool(ok), values)


def chi_omega_product_check(j: MatrixSubspace, budget: int = DEFAULT_BUDGET, seed=None) -> CheckReport:
    """``chi-hat(J) * omega(J^perp) >= n`` on the upper bounds (and exact values when known)."""
    c = strong_chi_estimate(j, budget, seed)
    if c.upper == INF:
        raise InvariantError("chi-hat upper bound is not finite")
    w = omega_estimate(j.perp(), budget, seed)
    ok = c.upper * w.upper >= j.n
    if c.exact and w.exact:
        ok = ok and c.lower * w.lower >= j.n
    return CheckReport(bool(ok), {"n": j.n, "chihat": [c.lower, c.upper], "omega": [w.lower, w.upper],
                                  "exact": bool(c.exact and w.exact)})
