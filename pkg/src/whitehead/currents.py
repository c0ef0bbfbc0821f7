"""Truncated geodesic currents and Euler words.

A current is represented by its coordinates <v, nu> for the reduced words
v with 1 <= |v| <= R.  Uniform currents use exact fractions, rational
currents integer occurrence counts; sampled estimates are floats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Real

import numpy as np

from .autos import Automorphism
from .core import (
    CyclicWord,
    Word,
    alphabet,
    cyclic_reduce,
    free_reduce,
    rank_of,
    reduced_words,
    sample_reduced,
    window_counts,
    word_str,
)

DEFAULT_RADIUS = 4
REL_TOL = 1e-9
# largest Euler word (in letters) that euler_word will build
EULER_SIZE_CAP = 2_000_000


class CurrentError(ValueError):
    pass


class TruncatedCurrent:
    """Coordinates <v, nu> for every reduced v with 1 <= |v| <= R."""

    __slots__ = ("k", "R", "table")

    def __init__(self, k: int, R: int, table: dict):
        if R < 1:
            raise CurrentError("radius must be at least 1")
        self.k = k
        self.R = R
        self.table = dict(table)
        for v in self.table:
            if not 1 <= len(v) <= R:
                raise CurrentError(f"coordinate {word_str(v)} outside radius {R}")
        for m in range(1, R + 1):
            for v in reduced_words(k, m):
                self.table.setdefault(v, 0)

    def __getitem__(self, v) -> Real:
        v = tuple(v)
        if not 1 <= len(v) <= self.R:
            raise CurrentError(f"|v| = {len(v)} outside 1..{self.R}")
        return self.table[free_reduce(v)]

    def level(self, m: int) -> list:
        return [(v, self.table[v]) for v in reduced_words(self.k, m)]

    def level_sum(self, m: int):
        return sum(x for _, x in self.level(m))

    def __mul__(self, c: Real) -> "TruncatedCurrent":
        return TruncatedCurrent(self.k, self.R, {v: c * x for v, x in self.table.items()})

    __rmul__ = __mul__

    def __truediv__(self, c: Real) -> "TruncatedCurrent":
        return self * (1 / Fraction(c) if isinstance(c, int) else 1 / c)

    def to_dict(self) -> dict:
        coords = {}
        for m in range(1, self.R + 1):
            for v, x in self.level(m):
                coords[word_str(v)] = _num(x)
        return {"k": self.k, "R": self.R, "coords": coords}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "TruncatedCurrent":
        table = {}
        for key, x in data["coords"].items():
            if isinstance(x, dict):
                x = Fraction(x["num"], x["den"])
            table[Word.parse(key)] = x
        return cls(data["k"], data["R"], table)


def _num(x):
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return x.numerator
        return {"num": x.numerator, "den": x.denominator}
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


def uniform_current(k: int, R: int = DEFAULT_RADIUS) -> TruncatedCurrent:
    """<v, n_A> = 1 / (2k (2k-1)^(|v|-1)), exactly."""
    if R < 2:
        raise CurrentError("radius must be at least 2")
    table = {}
    for m in range(1, R + 1):
        x = Fraction(1, 2 * k * (2 * k - 1) ** (m - 1))
        for v in reduced_words(k, m):
            table[v] = x
    return TruncatedCurrent(k, R, table)


def rational_current(g, R: int = DEFAULT_RADIUS, k: int | None = None) -> TruncatedCurrent:
    """Counting current of the conjugacy class of g.

    Coordinates are occurrence counts in the cyclic word of g itself, so a
    proper power g0^s gets s times the coordinates of g0.
    """
    if isinstance(g, CyclicWord):
        w = g
    else:
        g = free_reduce(g)
        if not g:
            raise CurrentError("the trivial element has no counting current")
        w = cyclic_reduce(g)[0]
    k = max(rank_of(w.letters), 2) if k is None else k
    table = {}
    for m in range(1, R + 1):
        table.update(window_counts(w, m))
    return TruncatedCurrent(k, R, {Word(v): c for v, c in table.items()})


def _close(x, y) -> bool:
    if isinstance(x, (int, Fraction)) and isinstance(y, (int, Fraction)):
        return x == y
    return abs(x - y) <= REL_TOL * max(abs(x), abs(y), 1e-300) or x == y


@dataclass(frozen=True)
class Violation:
    v: Word
    side: str  # "right" (sum over vx) or "left" (sum over xv)
    value: Real
    extension_sum: Real

    def __str__(self) -> str:
        return f"<{word_str(self.v)}> = {self.value} but {self.side} extensions sum to {self.extension_sum}"


def check_invariance(nu: TruncatedCurrent) -> list[Violation]:
    """Violations of <v> = sum <vx> = sum <xv> for 1 <= |v| < R."""
    sigma = alphabet(nu.k)
    out = []
    for m in range(1, nu.R):
        for v in reduced_words(nu.k, m):
            x = nu.table[v]
            right = sum(nu.table[v + (y,)] for y in sigma if y != -v[-1])
            left = sum(nu.table[(y,) + v] for y in sigma if y != -v[0])
            if not _close(x, right):
                out.append(Violation(v, "right", x, right))
            if not _close(x, left):
                out.append(Violation(v, "left", x, left))
    return out


def length(nu: TruncatedCurrent):
    """L(nu): the sum of the single-letter coordinates."""
    return nu.level_sum(1)


@dataclass(frozen=True)
class EulerWord:
    k: int
    m: int
    w: CyclicWord

    def __len__(self) -> int:
        return len(self.w)


def euler_length(k: int, m: int) -> int:
    return 2 * k * (2 * k - 1) ** (m - 1)


@lru_cache(maxsize=32)
def euler_word(k: int, m: int, size_cap: int = EULER_SIZE_CAP) -> EulerWord:
    """Cyclic word containing every reduced word of length m exactly once.

    Reads the last letters along an Euler circuit of the graph whose
    vertices are reduced words of length m-1 and whose edges are reduced
    words of length m (from the prefix to the suffix).  The circuit is found
    by Hierholzer's method, always leaving a vertex by its smallest unused
    edge, so the output is deterministic.
    """
    if m < 2:
        raise CurrentError("Euler words need m >= 2")
    if k < 1:
        raise CurrentError("rank must be positive")
    t = euler_length(k, m)
    if t > size_cap:
        raise CurrentError(f"Euler word of length {t} exceeds the size cap {size_cap}")
    sigma = alphabet(k)
    q = len(sigma)
    # a vertex (reduced word of length m-1) is encoded in base 2k by the
    # positions of its letters in sigma; its out-edges are the letters not
    # cancelling the last one, taken in sigma order via a per-vertex counter
    allowed = [[j for j, y in enumerate(sigma) if y != -x] for x in sigma]
    size = q ** (m - 1)
    used = bytearray(size)
    stack = [(0, -1)]  # a^(m-1), the least vertex
    labels = []
    while stack:
        u, lab = stack[-1]
        last = u % q
        j = used[u]
        if j < q - 1:
            used[u] = j + 1
            y = allowed[last][j]
            stack.append(((u * q + y) % size, y))
        else:
            stack.pop()
            if lab >= 0:
                labels.append(sigma[lab])
    labels.reverse()
    if len(labels) != t:
        raise CurrentError("Euler circuit did not use every edge")
    for i in range(t):
        if labels[i] == -labels[i - 1]:
            raise CurrentError("Euler circuit produced a cancelling pair")
    return EulerWord(k, m, CyclicWord(labels))


def pushforward_uniform(
    phi: Automorphism, R: int = 2, m_start: int | None = None, size_cap: int = EULER_SIZE_CAP
) -> tuple[TruncatedCurrent, int, bool]:
    """Coordinates of phi n_A up to radius R via Euler words.

    For large enough m the counting current of phi(w_m), scaled by
    1/||w_m||, agrees with phi n_A on words of length <= R.  Levels are
    raised until two consecutive ones give identical tables.  Returns
    ``(current, m, stabilized)``; ``stabilized`` is False when the size cap
    stopped the search first.
    """
    k = phi.k
    m = m_start if m_start is not None else 2 * phi.max_image_length() + 2
    m = max(m, 2)

    def table_at(m):
        ew = euler_word(k, m, size_cap)
        img = phi.apply_cyclic(ew.w)
        nu = rational_current(img, R, k)
        t = euler_length(k, m)
        return TruncatedCurrent(k, R, {v: Fraction(x, t) for v, x in nu.table.items()})

    prev = table_at(m)
    while True:
        if euler_length(k, m + 1) > size_cap:
            return prev, m, False
        nxt = table_at(m + 1)
        if nxt.table == prev.table:
            return prev, m, True
        prev, m = nxt, m + 1


@dataclass
class LimitReport:
    n: int
    samples: int
    radius: int
    max_deviation: float
    worst_word: str
    deviations: dict

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "samples": self.samples,
            "radius": self.radius,
            "max_deviation": self.max_deviation,
            "worst_word": self.worst_word,
            "deviations": self.deviations,
        }


def empirical_limit_check(
    phi: Automorphism | None,
    n: int,
    samples: int,
    rng: np.random.Generator,
    k: int = 2,
    radius: int = 3,
) -> LimitReport:
    """Compare mean <v, phi(omega_n)>/n over random omega_n with <v, phi n_A>.

    ``phi=None`` means the identity in rank ``k``; the target is then the
    exact uniform current.  Otherwise the target comes from
    :func:`pushforward_uniform`.
    """
    if n < 1:
        raise CurrentError("n must be >= 1")
    if phi is not None:
        k = phi.k
    if phi is None or phi.is_identity():
        phi = None
        target = uniform_current(k, max(radius, 2))
    else:
        target = pushforward_uniform(phi, radius)[0]
    totals = {}
    for _ in range(samples):
        w = sample_reduced(n, rng, k)
        if phi is not None:
            w = phi.apply(w)
        if not w:
            continue
        u = cyclic_reduce(w)[0]
        for m in range(1, radius + 1):
            for v, c in window_counts(u, m).items():
                totals[v] = totals.get(v, 0) + c
    devs = {}
    for m in range(1, radius + 1):
        for v in reduced_words(k, m):
            est = totals.get(tuple(v), 0) / (samples * n)
            devs[word_str(v)] = abs(est - float(target.table[v]))
    worst = max(devs, key=devs.get)
    return LimitReport(n, samples, radius, devs[worst], worst, devs)
