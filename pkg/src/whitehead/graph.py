"""Weighted and normalized Whitehead graphs.

Vertices are the 2k letters; edges are the k(2k-1) unordered pairs of
distinct letters, indexed in a fixed order (pairs (p, q) with p before q in
a < A < b < B < ...).  A graph is stored as a flat label vector in that
order, which doubles as the clustering feature vector.
"""

from __future__ import annotations

import json
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .autos import CharPair
from .core import CyclicWord, Letter, alphabet, letter_str, parse_letter


class GraphError(ValueError):
    pass


@lru_cache(maxsize=None)
def edge_list(k: int) -> tuple[tuple[Letter, Letter], ...]:
    sigma = alphabet(k)
    return tuple(
        (sigma[i], sigma[j]) for i in range(len(sigma)) for j in range(i + 1, len(sigma))
    )


@lru_cache(maxsize=None)
def edge_index(k: int) -> dict:
    idx = {}
    for e, (p, q) in enumerate(edge_list(k)):
        idx[p, q] = e
        idx[q, p] = e
    return idx


def edge_name(p: Letter, q: Letter) -> str:
    return letter_str(p) + letter_str(q)


class WhiteheadGraph:
    """Edge-labelled graph on Sigma; labels in :func:`edge_list` order."""

    __slots__ = ("k", "labels")

    def __init__(self, k: int, labels: Sequence):
        if len(labels) != k * (2 * k - 1):
            raise GraphError(f"rank {k} needs {k * (2 * k - 1)} labels, got {len(labels)}")
        if any(r < 0 for r in labels):
            raise GraphError("edge labels must be nonnegative")
        self.k = k
        self.labels = tuple(labels)

    def __getitem__(self, edge: tuple[Letter, Letter]):
        p, q = edge
        if p == q:
            return 0
        return self.labels[edge_index(self.k)[p, q]]

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.k == other.k and self.labels == other.labels

    def __hash__(self) -> int:
        return hash((self.k, self.labels))

    def __repr__(self) -> str:
        nz = ", ".join(
            f"{edge_name(p, q)}:{r}" for (p, q), r in zip(edge_list(self.k), self.labels) if r
        )
        return f"{type(self).__name__}(k={self.k}, {{{nz}}})"

    def total(self):
        return sum(self.labels)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=float)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "edges": [
                {"u": letter_str(p), "v": letter_str(q), "r": r}
                for (p, q), r in zip(edge_list(self.k), self.labels)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def csv_row(self) -> str:
        return ",".join(repr(float(r)) if isinstance(r, float) else str(r) for r in self.labels)

    @classmethod
    def from_dict(cls, data: dict) -> "WhiteheadGraph":
        k = data["k"]
        labels = [0] * (k * (2 * k - 1))
        idx = edge_index(k)
        for e in data["edges"]:
            labels[idx[parse_letter(e["u"]), parse_letter(e["v"])]] = e["r"]
        return cls(k, labels)


class NormalizedWhiteheadGraph(WhiteheadGraph):
    """Whitehead graph whose labels sum to 1."""

    __slots__ = ()

    def __init__(self, k: int, labels: Sequence):
        super().__init__(k, labels)
        if abs(sum(self.labels) - 1) > 1e-9:
            raise GraphError(f"normalized labels sum to {sum(self.labels)}, not 1")


def header(k: int) -> list[str]:
    return [edge_name(p, q) for p, q in edge_list(k)]


def whitehead_graph(w: CyclicWord, k: int | None = None) -> WhiteheadGraph:
    """Each cyclic two-letter subword xy adds 1 to the edge {x^-1, y}."""
    letters = w.letters
    if k is None:
        k = max(abs(x) for x in letters)
        k = max(k, 2)
    idx = edge_index(k)
    labels = [0] * (k * (2 * k - 1))
    prev = letters[-1]
    for y in letters:
        labels[idx[-prev, y]] += 1
        prev = y
    return WhiteheadGraph(k, labels)


def normalize(g: WhiteheadGraph, n) -> NormalizedWhiteheadGraph:
    if n <= 0:
        raise GraphError("normalizing length must be positive")
    return NormalizedWhiteheadGraph(g.k, [r / n for r in g.labels])


def normalized_graph(w: CyclicWord, k: int | None = None) -> NormalizedWhiteheadGraph:
    return normalize(whitehead_graph(w, k), len(w))


def graph_distance(g: WhiteheadGraph, h: WhiteheadGraph) -> float:
    """Max-norm distance between label vectors."""
    if g.k != h.k:
        raise GraphError(f"rank mismatch: {g.k} vs {h.k}")
    return max(abs(a - b) for a, b in zip(g.labels, h.labels))


def dot(P: Iterable[Letter], Q: Iterable[Letter], g: WhiteheadGraph):
    """Sum of labels of edges joining a vertex of P to a vertex of Q.

    Each edge is counted once even if both endpoints lie in P and in Q.
    """
    P, Q = set(P), set(Q)
    total = 0
    for (p, q), r in zip(edge_list(g.k), g.labels):
        if r and ((p in P and q in Q) or (q in P and p in Q)):
            total += r
    return total


@lru_cache(maxsize=None)
def _cut_masks(k: int, p: CharPair):
    # The junction xy of w sits on the edge {x^-1, y}; tau inserts a after x
    # when x is in T and a^-1 before y when y^-1 is in T.  Both tests are
    # membership of an endpoint in T^-1, so the cut is taken for (T^-1, a^-1).
    T = frozenset(-x for x in p.T)
    a = -p.a
    cut = []
    star = []
    for u, v in edge_list(k):
        cut.append(int((u in T) != (v in T)))
        star.append(int(a in (u, v)))
    return tuple(c - s for c, s in zip(cut, star))


def length_change(p: CharPair, g: WhiteheadGraph):
    """||tau(w)|| - ||w|| when g is the graph of w.

    This is the cut formula S.S' - b.Sigma evaluated at S = T^-1, b = a^-1,
    which is the form that matches the edge convention {x^-1, y} used here.
    For k = 2 it always coincides with T.T' - a.Sigma.
    """
    coeffs = _cut_masks(g.k, p)
    return sum(c * r for c, r in zip(coeffs, g.labels) if c)
