"""JSON encodings for matrices, subspaces, graphs, witnesses and certificates.

Complex numbers are ``[re, im]`` pairs.  Square matrices are
``{"n": n, "data": [...]}`` in row-major order; rectangular ones (Kraus
operators, isometries) use ``{"rows": r, "cols": c, "data": [...]}``.
Graph vertices are 1-based in files; colouring parts index the basis list
0-based.
"""

from __future__ import annotations

import json

import numpy as np

from .graphs import Graph, GraphFormatError
from .linalg import KINDS, DimensionError, MatrixSubspace, span, with_kind


class FormatError(ValueError):
    pass


def _pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).reshape(-1)]


def _complex(data, size: int) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape != (size, 2):
        raise FormatError(f"expected {size} [re, im] pairs, got array of shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    if a.shape[0] == a.shape[1]:
        return {"n": a.shape[0], "data": _pairs(a)}
    return {"rows": a.shape[0], "cols": a.shape[1], "data": _pairs(a)}


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        if "n" in obj:
            rows = cols = int(obj["n"])
        else:
            rows, cols = int(obj["rows"]), int(obj["cols"])
        return _complex(obj["data"], rows * cols).reshape(rows, cols)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad matrix object: {exc}") from None


def vector_to_json(v) -> list:
    return _pairs(v)


def vector_from_json(data) -> np.ndarray:
    return _complex(data, len(data))


def subspace_to_json(v: MatrixSubspace) -> dict:
    return {"n": v.n, "kind": v.kind, "spanning": [matrix_to_json(b) for b in v.basis]}


def subspace_from_json(obj: dict) -> MatrixSubspace:
    try:
        n = int(obj["n"])
        kind = obj.get("kind", "plain")
        mats = [matrix_from_json(m) for m in obj["spanning"]]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad subspace object: {exc}") from None
    if kind not in KINDS:
        raise FormatError(f"unknown kind {kind!r}")
    if any(m.shape != (n, n) for m in mats):
        raise DimensionError("spanning matrix does not match n")
    return with_kind(span(mats, n=n), kind)


def graph_to_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [[i + 1, j + 1] for i, j in g.sorted_edges()]}


def graph_from_json(obj: dict) -> Graph:
    try:
        n = int(obj["n"])
        edges = [(int(i) - 1, int(j) - 1) for i, j in obj["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"bad graph object: {exc}") from None
    return Graph.from_edges(n, edges)


def dumps(obj) -> str:
    """Canonical JSON text (sorted keys) so equal reports are byte-identical."""
    return json.dumps(obj, sort_keys=True, allow_nan=True)


def load(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def save(obj, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj) + "\n")
