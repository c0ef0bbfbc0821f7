"""Whitehead's algorithm: minimization, strict minimality, equivalence search."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

from .autos import CharPair, all_relabelings, enumerate_wh2, is_inner_wh2, wh2_images
from .core import CyclicWord
from .graph import length_change, whitehead_graph

DEFAULT_NODE_CAP = 10**6


def _rank(w: CyclicWord, k: int | None) -> int:
    need = max(abs(x) for x in w.letters)
    if k is None:
        return max(need, 2)
    if need > k:
        raise ValueError(f"{w} uses letters beyond rank {k}")
    return k


@dataclass
class MinimizationTrace:
    start: CyclicWord
    k: int
    steps: list[tuple[CharPair, CyclicWord]] = field(default_factory=list)

    @property
    def result(self) -> CyclicWord:
        return self.steps[-1][1] if self.steps else self.start

    def replay(self) -> CyclicWord:
        w = self.start
        for p, _ in self.steps:
            w = wh2_images(p, self.k).apply_cyclic(w)
        return w

    def to_dict(self) -> dict:
        return {
            "start": str(self.start),
            "k": self.k,
            "steps": [
                {"tau": p.to_dict(), "word": str(w), "length": len(w)} for p, w in self.steps
            ],
            "result": str(self.result),
            "length": len(self.result),
        }


def best_decrease(w: CyclicWord, k: int) -> tuple[CharPair | None, int]:
    """Steepest length change over all Whitehead pairs (first one on ties)."""
    g = whitehead_graph(w, k)
    best, best_change = None, 0
    for p in enumerate_wh2(k):
        c = length_change(p, g)
        if c < best_change:
            best, best_change = p, c
    return best, best_change


def minimize(w: CyclicWord, k: int | None = None) -> MinimizationTrace:
    """Greedy steepest-descent Whitehead minimization."""
    k = _rank(w, k)
    trace = MinimizationTrace(w, k)
    cur = w
    while True:
        p, change = best_decrease(cur, k)
        if p is None:
            return trace
        nxt = wh2_images(p, k).apply_cyclic(cur)
        assert len(nxt) == len(cur) + change
        trace.steps.append((p, nxt))
        cur = nxt


def is_minimal_by_wh2(w: CyclicWord, k: int | None = None) -> bool:
    """No Whitehead automorphism of the second kind shortens w."""
    return best_decrease(w, _rank(w, k))[0] is None


def is_strictly_minimal(w: CyclicWord, k: int | None = None) -> bool:
    """Every non-inner Whitehead automorphism strictly lengthens w."""
    k = _rank(w, k)
    g = whitehead_graph(w, k)
    return all(
        length_change(p, g) > 0 for p in enumerate_wh2(k) if not is_inner_wh2(p, k)
    )


class Equivalence(enum.Enum):
    EQUIVALENT = "equivalent"
    INEQUIVALENT = "inequivalent"
    CAP_EXCEEDED = "cap_exceeded"


@dataclass
class EquivalenceResult:
    verdict: Equivalence
    min_u: CyclicWord
    min_v: CyclicWord
    visited: int

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "min_u": str(self.min_u),
            "min_v": str(self.min_v),
            "visited": self.visited,
        }


def automorphic_equivalence(
    u: CyclicWord, v: CyclicWord, node_cap: int = DEFAULT_NODE_CAP, k: int | None = None
) -> EquivalenceResult:
    """Decide whether some automorphism maps u to v (up to conjugacy).

    Both words are minimized; equal-length minimal words are then joined by
    a breadth-first search through length-preserving Whitehead moves of both
    kinds.  ``node_cap`` bounds the number of distinct words visited.
    """
    k = max(_rank(u, k), _rank(v, k))
    mu = minimize(u, k).result
    mv = minimize(v, k).result
    if len(mu) != len(mv):
        return EquivalenceResult(Equivalence.INEQUIVALENT, mu, mv, 0)
    moves = [wh2_images(p, k) for p in enumerate_wh2(k) if not is_inner_wh2(p, k)]
    moves += list(all_relabelings(k))[1:]
    n = len(mu)
    seen = {mu}
    queue = deque([mu])
    while queue:
        w = queue.popleft()
        if w == mv:
            return EquivalenceResult(Equivalence.EQUIVALENT, mu, mv, len(seen))
        for phi in moves:
            if phi.cyclic_length_of(w) != n:
                continue
            x = phi.apply_cyclic(w)
            if x not in seen:
                if len(seen) >= node_cap:
                    return EquivalenceResult(Equivalence.CAP_EXCEEDED, mu, mv, len(seen))
                seen.add(x)
                queue.append(x)
    return EquivalenceResult(Equivalence.INEQUIVALENT, mu, mv, len(seen))
