"""Finite simple graphs on ``{0, ..., n-1}`` with exact small-instance parameters.

Files use 1-based vertices (``"n m"`` header, then ``m`` lines ``"i j"``);
everything in memory is 0-based.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_NODE_BUDGET = 2_000_000
MAX_EXACT_VERTICES = 40


class GraphFormatError(ValueError):
    pass


class ExactUnavailable(RuntimeError):
    """The exact branch-and-bound oracle is out of its size or node budget."""


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset

    def __post_init__(self):
        clean = set()
        for e in self.edges:
            i, j = e
            if i == j:
                raise GraphFormatError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphFormatError(f"edge {e} out of range for n={self.n}")
            clean.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={sorted(self.edges)})"

    def adjacent(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def neighbours(self, v: int) -> list[int]:
        return [u for u in range(self.n) if u != v and self.adjacent(u, v)]

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=int)
        for i, j in self.edges:
            a[i, j] = a[j, i] = 1
        return a

    def bitsets(self) -> list[int]:
        nb = [0] * self.n
        for i, j in self.edges:
            nb[i] |= 1 << j
            nb[j] |= 1 << i
        return nb

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def relabel(self, perm) -> "Graph":
        """Graph with vertex ``i`` renamed ``perm[i]``."""
        return Graph.from_edges(self.n, [(perm[i], perm[j]) for i, j in self.edges])


def complete(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def empty(n: int) -> Graph:
    return Graph(n, frozenset())


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def random_graph(n: int, p: float, rng) -> Graph:
    rng = np.random.default_rng(rng)
    pairs = list(itertools.combinations(range(n), 2))
    keep = rng.random(len(pairs)) < p
    return Graph.from_edges(n, [e for e, k in zip(pairs, keep) if k])


def complement(g: Graph) -> Graph:
    return Graph.from_edges(g.n, [e for e in itertools.combinations(range(g.n), 2) if e not in g.edges])


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """``G box H`` with vertex ``(i, k)`` at index ``i * h.n + k``."""
    m = h.n
    edges = [(i * m + k, j * m + k) for i, j in g.edges for k in range(m)]
    edges += [(i * m + k, i * m + l) for i in range(g.n) for k, l in h.edges]
    return Graph.from_edges(g.n * m, edges)


def categorical_product(g: Graph, h: Graph) -> Graph:
    m = h.n
    edges = []
    for i, j in g.edges:
        for k, l in h.edges:
            edges.append((i * m + k, j * m + l))
            edges.append((i * m + l, j * m + k))
    return Graph.from_edges(g.n * m, edges)


def blowup(g: Graph, d: int) -> Graph:
    """Graph of the matrix units in ``M_d (x) S_G``: ``(k,i) ~ (l,j)`` iff ``i ~ j`` or ``i == j``."""
    n = g.n
    edges = []
    for a, b in itertools.combinations(range(d * n), 2):
        i, j = a % n, b % n
        if i == j or g.adjacent(i, j):
            edges.append((a, b))
    return Graph.from_edges(d * n, edges)


# --------------------------------------------------------------------------
# exact oracles


def _check_size(g: Graph):
    if g.n > MAX_EXACT_VERTICES:
        raise ExactUnavailable(f"exact oracle limited to n <= {MAX_EXACT_VERTICES}, got {g.n}")


def _lowbit(x: int) -> int:
    return (x & -x).bit_length() - 1


def _max_clique(adj: list[int], n: int, budget: int) -> list[int]:
    """Branch and bound with greedy-colouring bounds on the candidate set."""
    best = [0, 0]  # size, bitset
    nodes = [0]

    def colour_order(cand: int):
        order, bounds = [], []
        colour = 0
        rest = cand
        while rest:
            colour += 1
            avail = rest
            while avail:
                v = _lowbit(avail)
                avail &= ~(adj[v] | (1 << v))
                rest &= ~(1 << v)
                order.append(v)
                bounds.append(colour)
        return order, bounds

    def expand(clique: int, size: int, cand: int):
        nodes[0] += 1
        if nodes[0] > budget:
            raise ExactUnavailable("clique search exceeded its node budget")
        order, bounds = colour_order(cand)
        for idx in range(len(order) - 1, -1, -1):
            if size + bounds[idx] <= best[0]:
                return
            v = order[idx]
            sub = cand & adj[v]
            if sub:
                expand(clique | (1 << v), size + 1, sub)
            elif size + 1 > best[0]:
                best[0], best[1] = size + 1, clique | (1 << v)
            cand &= ~(1 << v)

    if n:
        expand(0, 0, (1 << n) - 1)
    return [v for v in range(n) if best[1] >> v & 1]


def maximum_independent_set(g: Graph, budget: int = DEFAULT_NODE_BUDGET) -> list[int]:
    _check_size(g)
    full = (1 << g.n) - 1
    comp = [full & ~b & ~(1 << v) for v, b in enumerate(g.bitsets())]
    return _max_clique(comp, g.n, budget)


def maximum_clique(g: Graph, budget: int = DEFAULT_NODE_BUDGET) -> list[int]:
    return maximum_independent_set(complement(g), budget)


def alpha_exact(g: Graph, budget: int = DEFAULT_NODE_BUDGET) -> int:
    return len(maximum_independent_set(g, budget))


def omega_exact(g: Graph, budget: int = DEFAULT_NODE_BUDGET) -> int:
    return alpha_exact(complement(g), budget)


def dsatur_colouring(g: Graph) -> list[int]:
    """Greedy DSATUR colouring (an upper bound for the chromatic number)."""
    nb = [g.neighbours(v) for v in range(g.n)]
    colour = [-1] * g.n
    for _ in range(g.n):
        v = max(
            (u for u in range(g.n) if colour[u] < 0),
            key=lambda u: (len({colour[w] for w in nb[u] if colour[w] >= 0}), len(nb[u]), -u),
        )
        used = {colour[w] for w in nb[v]}
        colour[v] = next(c for c in itertools.count() if c not in used)
    return colour


def _colour_with(g: Graph, k: int, seed_clique: list[int], budget: int) -> list[int] | None:
    nb = g.bitsets()
    n = g.n
    colour = [-1] * n
    # per-vertex bitmask of colours present in the neighbourhood
    forbidden = [0] * n
    nodes = [0]

    def assign(v, c):
        colour[v] = c
        changed = []
        for u in range(n):
            if nb[v] >> u & 1 and not forbidden[u] >> c & 1:
                forbidden[u] |= 1 << c
                changed.append(u)
        return changed

    def undo(v, c, changed):
        colour[v] = -1
        for u in changed:
            forbidden[u] &= ~(1 << c)

    for c, v in enumerate(seed_clique):
        assign(v, c)
    used0 = len(seed_clique)

    def search(used: int, remaining: int) -> bool:
        nodes[0] += 1
        if nodes[0] > budget:
            raise ExactUnavailable("colouring search exceeded its node budget")
        if remaining == 0:
            return True
        v = max(
            (u for u in range(n) if colour[u] < 0),
            key=lambda u: (bin(forbidden[u]).count("1"), bin(nb[u]).count("1"), -u),
        )
        for c in range(min(used + 1, k)):
            if forbidden[v] >> c & 1:
                continue
            changed = assign(v, c)
            if search(max(used, c + 1), remaining - 1):
                return True
            undo(v, c, changed)
        return False

    if search(used0, n - used0):
        return list(colour)
    return None


def optimal_colouring(g: Graph, budget: int = DEFAULT_NODE_BUDGET) -> list[int]:
    """A colouring with exactly ``chi(g)`` colours (values ``0..chi-1``)."""
    _check_size(g)
    if g.n == 0:
        return []
    clique = maximum_clique(g, budget)
    best = dsatur_colouring(g)
    upper = max(best) + 1
    for k in range(len(clique), upper):
        found = _colour_with(g, k, clique, budget)
        if found is not None:
            return found
    return best


def chi_exact(g: Graph, budget: int = DEFAULT_NODE_BUDGET) -> int:
    col = optimal_colouring(g, budget)
    return max(col) + 1 if col else 0


def is_proper_colouring(g: Graph, colour) -> bool:
    return all(colour[i] != colour[j] for i, j in g.edges)


# --------------------------------------------------------------------------
# enumeration


@lru_cache(maxsize=None)
def all_graphs(n: int) -> tuple[Graph, ...]:
    """One labelled representative of every isomorphism class on ``n`` vertices."""
    pairs = list(itertools.combinations(range(n), 2))
    index = {e: t for t, e in enumerate(pairs)}
    perm_maps = []
    for perm in itertools.permutations(range(n)):
        perm_maps.append([index[tuple(sorted((perm[i], perm[j])))] for i, j in pairs])
    seen = set()
    reps = []
    for mask in range(1 << len(pairs)):
        bits = [t for t in range(len(pairs)) if mask >> t & 1]
        canon = min(sum(1 << pm[t] for t in bits) for pm in perm_maps)
        if canon in seen:
            continue
        seen.add(canon)
        reps.append(Graph.from_edges(n, [pairs[t] for t in range(len(pairs)) if canon >> t & 1]))
    return tuple(reps)


# --------------------------------------------------------------------------
# text format


def parse_graph(text: str) -> Graph:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphFormatError("empty graph file")
    try:
        n, m = (int(t) for t in lines[0].split())
    except ValueError:
        raise GraphFormatError(f"bad header {lines[0]!r}; expected 'n m'") from None
    if n < 0 or m < 0:
        raise GraphFormatError("negative counts in header")
    body = lines[1:]
    if len(body) != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(body)} lines")
    edges = set()
    for ln in body:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"malformed edge line {ln!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"malformed edge line {ln!r}") from None
        if i == j:
            raise GraphFormatError(f"loop at vertex {i}")
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphFormatError(f"vertex out of range in {ln!r}")
        e = (min(i, j) - 1, max(i, j) - 1)
        if e in edges:
            warnings.warn(f"duplicate edge {i} {j} ignored", stacklevel=2)
        edges.add(e)
    return Graph(n, frozenset(edges))


def emit_graph(g: Graph) -> str:
    lines = [f"{g.n} {len(g.edges)}"]
    lines += [f"{i + 1} {j + 1}" for i, j in g.sorted_edges()]
    return "\n".join(lines) + "\n"
