"""End-to-end check suites.  Each suite returns a list of row dicts with a
``"pass"`` field; :func:`run` prints them as JSON lines plus a summary table.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import graphs as gr
from ._seeding import substream
from .formats import dumps
from .homomorphism import (
    KrausMap,
    box_left_embedding,
    box_right_embedding,
    chi0_monotonicity,
    embed_amplify,
    graph_hom_map,
    identity_map,
    partial_trace_map,
    partial_trace_second,
    unitary_map,
    verify_hom,
)
from .linalg import (
    InvariantError,
    OrthonormalFamily,
    fourier_vectors,
    random_unitary,
    same_subspace,
    span,
)
from .ncgraph import (
    amplify,
    box_product,
    categorical_product,
    conjugate,
    delta_space,
    offdiagonal_system,
    permutation_matrix,
    system_from_graph,
    traceless_from_graph,
)
from .parameters import (
    Colouring,
    alpha_estimate,
    chi0_estimate,
    chi_estimate,
    chi_omega_product_check,
    is_independent_set,
    omega_estimate,
    sandwich_check,
    strong_chi_estimate,
)
from .theta import theta_bar, theta_classical, theta_system

SUITES = ("faithfulness", "duality", "theta", "examples", "sandwich", "products", "sabidussi",
          "hedetniemi", "homomorphisms")
RANDOM_GRAPHS = 200
SUBSPACE_TRIALS = 100


def _gid(g: gr.Graph) -> str:
    return f"n{g.n}:" + ",".join(f"{i + 1}-{j + 1}" for i, j in g.sorted_edges())


def graph_suite(seed, random_count: int = RANDOM_GRAPHS):
    """All isomorphism classes on at most 5 vertices, then random graphs on 6 or 7."""
    out = [g for n in range(1, 6) for g in gr.all_graphs(n)]
    for k in range(random_count):
        rng = substream(seed, "graph-suite", k)
        n = int(rng.integers(6, 8))
        out.append(gr.random_graph(n, 0.5, rng))
    return out


def graph_pool():
    return [
        ("K1", gr.complete(1)), ("K2", gr.complete(2)), ("E2", gr.empty(2)), ("P3", gr.path(3)),
        ("K3", gr.complete(3)), ("E3", gr.empty(3)), ("C4", gr.cycle(4)), ("K4", gr.complete(4)),
        ("P4", gr.path(4)), ("K13", gr.star(3)),
    ]


def _bounds(est):
    return [None if est.lower == math.inf else est.lower, None if est.upper == math.inf else est.upper]


def _exact_value(est):
    return est.lower if est.exact else None


# --------------------------------------------------------------------------


def suite_faithfulness(seed, random_count: int = RANDOM_GRAPHS):
    rows = []
    for g in graph_suite(seed, random_count):
        a, w, c = gr.alpha_exact(g), gr.omega_exact(g), gr.chi_exact(g)
        s, j = system_from_graph(g), traceless_from_graph(g)
        got = {
            "S.alpha": _exact_value(alpha_estimate(s, seed=seed)),
            "S.omega": _exact_value(omega_estimate(s, seed=seed)),
            "S.chi": _exact_value(chi_estimate(s, seed=seed)),
            "J.alpha": _exact_value(alpha_estimate(j, seed=seed)),
            "J.omega": _exact_value(omega_estimate(j, seed=seed)),
            "J.chi": _exact_value(chi_estimate(j, seed=seed)),
            "J.chihat": _exact_value(strong_chi_estimate(j, seed=seed)),
            "J.chi0": _exact_value(chi0_estimate(j, seed=seed)),
        }
        want = {"S.alpha": a, "S.omega": w, "S.chi": c, "J.alpha": a, "J.omega": w, "J.chi": c,
                "J.chihat": c, "J.chi0": c}
        prod = chi_omega_product_check(j, seed=seed)
        rows.append({"id": _gid(g), "n": g.n, "classical": [a, w, c], "got": got,
                     "chihat_omega": prod.passed, "pass": got == want and prod.passed})
    return rows


def suite_duality(seed, random_count: int = RANDOM_GRAPHS):
    rows = []
    for g in graph_suite(seed, random_count):
        gc = gr.complement(g)
        ok1 = same_subspace(system_from_graph(g).perp(), traceless_from_graph(gc))
        ok2 = same_subspace(traceless_from_graph(g).perp(), system_from_graph(gc))
        rows.append({"id": _gid(g), "S_perp": ok1, "J_perp": ok2, "pass": ok1 and ok2})
    for k in range(SUBSPACE_TRIALS):
        rng = substream(seed, "perp-perp", k)
        dim = int(rng.integers(0, 17))
        mats = rng.standard_normal((dim, 4, 4)) + 1j * rng.standard_normal((dim, 4, 4))
        v = span(mats, n=4)
        ok = same_subspace(v.perp().perp(), v) and v.dim + v.perp().dim == 16
        rows.append({"id": f"perp-perp:{k}", "dim": v.dim, "pass": bool(ok)})
    return rows


def suite_theta(seed, random_count: int = 100):
    rows = []
    c5 = theta_classical(gr.cycle(5))
    rows.append({"id": "C5", "theta": c5, "pass": abs(c5 - math.sqrt(5)) <= 1e-5})
    for n in range(1, 8):
        tk, te = theta_classical(gr.complete(n)), theta_classical(gr.empty(n))
        rows.append({"id": f"K{n}/E{n}", "theta_K": tk, "theta_E": te,
                     "pass": abs(tk - 1) <= 1e-6 and abs(te - n) <= 1e-6})
    for k in range(random_count):
        rng = substream(seed, "theta-random", k)
        n = int(rng.integers(2, 8))
        g = gr.random_graph(n, float(rng.uniform(0.2, 0.8)), rng)
        t = theta_classical(g)
        a, cb = gr.alpha_exact(g), gr.chi_exact(gr.complement(g))
        rows.append({"id": _gid(g), "alpha": a, "theta": t, "chi_bar": cb,
                     "pass": a - 1e-6 <= t <= cb + 1e-6})
    return rows


def roots_of_unity_colouring(n: int) -> Colouring:
    return Colouring(fourier_vectors(n), [(k,) for k in range(n)], "strong")


def suite_examples(seed):
    rows = []
    for n in (3, 4, 5):
        s = offdiagonal_system(n)
        a, c, t = alpha_estimate(s, seed=seed), chi_estimate(s, seed=seed), theta_system(s, seed=seed)
        rows.append({"id": f"offdiag:{n}", "alpha": _bounds(a), "chi": _bounds(c), "theta": [t.lower, t.upper],
                     "pass": a.exact and a.lower == 1 and c.exact and c.lower == n
                     and abs(t.lower - n) <= 1e-6 and abs(t.upper - n) <= 1e-6})
        d = delta_space(n)
        tb, ch = theta_bar(d, seed=seed), strong_chi_estimate(d, seed=seed)
        prod = chi_omega_product_check(d, seed=seed)
        rows.append({"id": f"delta:{n}", "theta_bar": [tb.lower, tb.upper], "chihat": _bounds(ch),
                     "chihat_omega": prod.passed,
                     "pass": tb.lower >= n - 1e-4 and tb.upper <= n + 1e-12 and ch.exact and ch.lower == n
                     and prod.passed})
        td = s.perp()
        wit = roots_of_unity_colouring(n)
        ok_wit = wit.violation(td) <= 1e-9 and all(is_independent_set(td, wit.basis[[k]], strong=True)[0]
                                                    for k in range(n))
        ch2 = strong_chi_estimate(td, seed=seed)
        prod2 = chi_omega_product_check(td, seed=seed)
        rows.append({"id": f"traceless-diagonal:{n}", "witness": ok_wit, "chihat": _bounds(ch2),
                     "chihat_omega": prod2.passed,
                     "pass": ok_wit and ch2.exact and ch2.lower == n and prod2.passed})
    return rows


def suite_sandwich(seed, random_count: int = RANDOM_GRAPHS):
    rows = []
    for g in graph_suite(seed, random_count):
        ds = (1, 2) if g.n <= 5 else (1,)
        for d in ds:
            rep = sandwich_check(system_from_graph(g), d, seed=seed)
            row = {"id": _gid(g), **rep.to_json()}
            rows.append(row)
    c5 = sandwich_check(system_from_graph(gr.cycle(5)), 1, seed=seed)
    v = c5.values
    chain = (v["alpha_lower"] == v["alpha_upper"] == 2 and abs(v["theta_lower"] - math.sqrt(5)) <= 1e-6
             and abs(v["theta_upper"] - math.sqrt(5)) <= 1e-6 and v["chihat_lower"] == v["chihat_upper"] == 3)
    rows.append({"id": "C5-chain", "values": [2, math.sqrt(5), 3], "pass": bool(chain and c5.passed)})
    return rows


def suite_products(seed):
    rows = []
    for (ng, g), (nh, h) in itertools.product(graph_pool(), repeat=2):
        jg, jh = traceless_from_graph(g), traceless_from_graph(h)
        box = same_subspace(box_product(jg, jh), traceless_from_graph(gr.cartesian_product(g, h)))
        ten = same_subspace(categorical_product(jg, jh), traceless_from_graph(gr.categorical_product(g, h)))
        rows.append({"id": f"{ng}x{nh}", "box": box, "tensor": ten, "pass": box and ten})
    return rows


def modular_colouring(fv: Colouring, gw: Colouring, c: int | None = None) -> Colouring:
    """Colour ``v_i (x) w_j`` by ``f(i) + g(j) mod c`` (index ``i * m + j``)."""
    f = {i: s for s, part in enumerate(fv.parts) for i in part}
    g = {j: s for s, part in enumerate(gw.parts) for j in part}
    c = c or max(fv.size, gw.size)
    n, m = len(f), len(g)
    basis = np.einsum("ia,jb->ijab", fv.basis, gw.basis).reshape(n * m, n * m)
    colour = [(f[i] + g[j]) % c for i in range(n) for j in range(m)]
    parts = [tuple(k for k in range(n * m) if colour[k] == s) for s in range(c)]
    return Colouring(basis, [p for p in parts if p], "strong")


def suite_sabidussi(seed):
    rows = []
    for t, ((ng, g), (nh, h)) in enumerate(itertools.product(graph_pool(), repeat=2)):
        classical = gr.chi_exact(gr.cartesian_product(g, h)) == max(gr.chi_exact(g), gr.chi_exact(h))
        for rotated in (False, True):
            u = random_unitary(g.n, substream(seed, "sabidussi", t, "u")) if rotated else np.eye(g.n)
            w = random_unitary(h.n, substream(seed, "sabidussi", t, "w")) if rotated else np.eye(h.n)
            jg, jh = conjugate(traceless_from_graph(g), u), conjugate(traceless_from_graph(h), w)
            cg = strong_chi_estimate(traceless_from_graph(g), seed=seed).witness
            ch = strong_chi_estimate(traceless_from_graph(h), seed=seed).witness
            # rotate the standard-basis witnesses along with the spaces
            fv = Colouring(cg.basis @ u.T, cg.parts, "strong")
            gw = Colouring(ch.basis @ w.T, ch.parts, "strong")
            v_fam, w_fam = OrthonormalFamily(u.T), OrthonormalFamily(w.T)
            space = box_product(jg, jh, v_fam, w_fam)
            col = modular_colouring(fv, gw)
            try:
                resid = col.validate(space)
                ok = True
            except InvariantError:
                resid, ok = col.violation(space), False
            rows.append({"id": f"{ng}x{nh}{'/rot' if rotated else ''}", "colours": col.size,
                         "bound": max(fv.size, gw.size), "residual": resid, "classical": classical,
                         "pass": ok and classical and col.size <= max(fv.size, gw.size)})
    return rows


def suite_hedetniemi(seed):
    rows = []
    for (ng, g), (nh, h) in itertools.product(graph_pool(), repeat=2):
        cg, ch = gr.chi_exact(g), gr.chi_exact(h)
        classical = gr.chi_exact(gr.categorical_product(g, h)) <= min(cg, ch)
        jg, jh = traceless_from_graph(g), traceless_from_graph(h)
        prod = categorical_product(jg, jh)
        c0 = chi0_estimate(prod, seed=seed)
        right = chi0_monotonicity(partial_trace_map(h.n, g.n), prod, jh, seed=seed)
        left = chi0_monotonicity(partial_trace_second(g.n, h.n), prod, jg, seed=seed)
        ok = (classical and c0.exact and c0.upper <= min(cg, ch) and right.passed and left.passed
              and right.transported_size <= ch and left.transported_size <= cg)
        rows.append({"id": f"{ng}x{nh}", "chi0": c0.upper, "min": min(cg, ch),
                     "transported": [left.transported_size, right.transported_size], "pass": bool(ok)})
    return rows


def hom_instances(seed):
    """``(name, map, J, K, graph_derived)`` for every construction in the suite."""
    c5, p4, c4, k2, k3, p3 = (gr.cycle(5), gr.path(4), gr.cycle(4), gr.complete(2), gr.complete(3),
                              gr.path(3))
    jc5, jp4, jc4, jk2, jp3 = (traceless_from_graph(x) for x in (c5, p4, c4, k2, p3))
    perm = permutation_matrix([2, 0, 4, 1, 3])
    u = random_unitary(5, substream(seed, "hom", "unitary"))
    v = OrthonormalFamily(fourier_vectors(3))
    w = OrthonormalFamily(random_unitary(2, substream(seed, "hom", "w")).T)
    box_vw = box_product(jp3, jk2, v, w)
    box_std = box_product(jp3, jk2)
    ident = np.eye(3)
    return [
        ("inclusion P4<C4", identity_map(4), jp4, jc4, True),
        ("permutation C5", unitary_map(perm), jc5, conjugate(jc5, perm), True),
        ("unitary C5", unitary_map(u), jc5, conjugate(jc5, u), False),
        ("embed_amplify K2 d=2", embed_amplify(2, 2), jk2, amplify(jk2, 2), True),
        ("embed_amplify C5 d=2", embed_amplify(5, 2), jc5, amplify(jc5, 2), True),
        ("partial trace C5 d=2", partial_trace_map(5, 2), amplify(jc5, 2), jc5, True),
        ("box left P3,K2 std", box_left_embedding(3, np.eye(2)[0]), jp3, box_std, True),
        ("box right P3,K2 std", box_right_embedding(2, ident[0]), jk2, box_std, True),
        ("box left P3,K2 (v,w)", box_left_embedding(3, w.vectors[0]), jp3, box_vw, False),
        ("box right P3,K2 (v,w)", box_right_embedding(2, v.vectors[0]), jk2, box_vw, False),
        ("colouring C5->K3", graph_hom_map(c5, k3, [0, 1, 0, 1, 2]), jc5, traceless_from_graph(k3), True),
        ("colouring P4->K2", graph_hom_map(p4, k2, [0, 1, 0, 1]), jp4, jk2, True),
    ]


def mutate(k: KrausMap, rng) -> KrausMap:
    ops = k.kraus.copy()
    idx = tuple(int(rng.integers(0, s)) for s in ops.shape)
    ops[idx] += 0.1 + 0.1j
    return KrausMap(k.n_in, k.n_out, ops)


def check_certificate(k: KrausMap, j, t):
    """``(ok, residual)`` without raising: a trace-preservation failure is a failed check."""
    try:
        return verify_hom(k, j, t)
    except InvariantError:
        return False, float(k.tp_defect())


def suite_homomorphisms(seed, mutations: int = 20):
    rows = []
    inst = hom_instances(seed)
    for name, k, j, t, derived in inst:
        ok, resid = check_certificate(k, j, t)
        row = {"id": name, "verified": ok, "residual": resid}
        good = ok
        if derived:
            rep = chi0_monotonicity(k, j, t, seed=seed)
            row["transport"] = rep.to_json()
            good = good and rep.passed
        row["pass"] = bool(good)
        rows.append(row)
    for m in range(mutations):
        rng = substream(seed, "mutation", m)
        name, k, j, t, _ = inst[int(rng.integers(0, len(inst)))]
        ok, resid = check_certificate(mutate(k, rng), j, t)
        rows.append({"id": f"mutated:{m}:{name}", "verified": ok, "residual": resid, "pass": not ok})
    return rows


SUITE_FUNCS = {
    "faithfulness": suite_faithfulness,
    "duality": suite_duality,
    "theta": suite_theta,
    "examples": suite_examples,
    "sandwich": suite_sandwich,
    "products": suite_products,
    "sabidussi": suite_sabidussi,
    "hedetniemi": suite_hedetniemi,
    "homomorphisms": suite_homomorphisms,
}


def _clean(obj):
    if isinstance(obj, float):
        return None if math.isinf(obj) else round(obj, 9)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def run(suite: str, seed: int, out) -> bool:
    """Run ``suite`` (or ``"all"``), write the report to ``out``; return overall pass."""
    names = SUITES if suite == "all" else (suite,)
    summary = []
    for name in names:
        rows = SUITE_FUNCS[name](seed)
        for i, row in enumerate(rows):
            out.write(dumps(_clean({"suite": name, "index": i, **row})) + "\n")
        fails = sum(not r["pass"] for r in rows)
        summary.append((name, len(rows), fails))
    out.write("\n")
    out.write(f"{'suite':<15}{'rows':>6}{'fail':>6}  status\n")
    for name, total, fails in summary:
        out.write(f"{name:<15}{total:>6}{fails:>6}  {'PASS' if fails == 0 else 'FAIL'}\n")
    return all(f == 0 for _, _, f in summary)
