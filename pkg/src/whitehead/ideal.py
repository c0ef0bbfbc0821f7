"""Generic stretching factors and the ideal Whitehead step.

The generic stretching factor of phi is L(phi n_A).  It is computed
exactly from Euler words: once m is large enough,
||phi(w_m)|| / ||w_m|| equals L(phi n_A), and the normalized Whitehead
graph of phi(w_m) is the limit of the graphs of phi applied to long random
words.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .autos import (
    Automorphism,
    AutomorphismError,
    CharPair,
    compose,
    enumerate_wh2,
    invert_pair,
    is_simple,
    wh2_images,
)
from .core import alphabet, free_reduce
from .currents import EULER_SIZE_CAP, euler_length, euler_word
from .graph import NormalizedWhiteheadGraph, length_change, normalize, whitehead_graph

DEFAULT_MAX_STEPS = 64


class IdealError(ValueError):
    pass


@dataclass(frozen=True)
class StretchResult:
    """lambda = image_length / euler_length at Euler level m_used."""

    image_length: int
    euler_length: int
    m_used: int
    stabilized: bool
    # (image_length, euler_length) one level below m_used, kept when unstabilized
    previous_level: tuple[int, int] | None = None

    @property
    def value(self) -> Fraction:
        return Fraction(self.image_length, self.euler_length)

    def to_dict(self) -> dict:
        v = self.value
        out = {
            "num": v.numerator,
            "den": v.denominator,
            "image_length": self.image_length,
            "euler_length": self.euler_length,
            "m_used": self.m_used,
            "stabilized": self.stabilized,
        }
        if self.previous_level is not None:
            num, den = self.previous_level
            out["previous_level"] = {"num": num, "den": den}
        return out


def _tighten(images, k: int):
    """A conjugate x^-1 phi(.) x of the images with short images.

    Conjugation keeps every cyclic length, so any conjugate gives a valid
    start level; single-letter conjugations are applied while they shrink
    (longest image, total length).
    """
    images = [free_reduce(u) for u in images]

    def size(imgs):
        return max(len(u) for u in imgs), sum(len(u) for u in imgs)

    best = size(images)
    improved = True
    while improved:
        improved = False
        for x in alphabet(k):
            cand = [free_reduce((-x,) + u + (x,)) for u in images]
            if size(cand) < best:
                images, best, improved = cand, size(cand), True
                break
    return images


def start_level(phi: Automorphism) -> int:
    """2 max|phi(a_i)| + 2, measured on a conjugate of phi with short images."""
    return 2 * max(len(u) for u in _tighten(phi.images, phi.k)) + 2


def _image_length(phi: Automorphism, m: int, size_cap: int) -> int:
    return phi.cyclic_length_of(euler_word(phi.k, m, size_cap).w)


def stretch_factor(
    phi: Automorphism, m_start: int | None = None, size_cap: int = EULER_SIZE_CAP
) -> StretchResult:
    """Exact generic stretching factor L(phi n_A).

    Raises the Euler level from ``m_start`` (default 2 max|phi(a_i)| + 2)
    until two consecutive levels give the same ratio.  A start level whose
    Euler word would not leave room for one comparison under ``size_cap`` is
    lowered to the highest level that does; the comparison still decides.
    If the size cap is reached first, the last ratio is returned with
    ``stabilized=False`` and the ratio one level below in ``previous_level``.
    """
    k = phi.k
    m = max(m_start if m_start is not None else start_level(phi), 2)
    if euler_length(k, 3) > size_cap:
        raise IdealError(f"size cap {size_cap} leaves no room to compare Euler levels 2 and 3")
    while euler_length(k, m + 1) > size_cap:
        m -= 1
    cur = _image_length(phi, m, size_cap)
    prev = None
    while euler_length(k, m + 1) <= size_cap:
        nxt = _image_length(phi, m + 1, size_cap)
        # E(m+1) = (2k-1) E(m), so equal ratios means nxt = (2k-1) cur
        if nxt == cur * (2 * k - 1):
            return StretchResult(cur, euler_length(k, m), m, True)
        prev = (cur, euler_length(k, m))
        m, cur = m + 1, nxt
    return StretchResult(cur, euler_length(k, m), m, False, prev)


def surrogate_level(phi: Automorphism, size_cap: int = EULER_SIZE_CAP) -> tuple[int, bool]:
    """Euler level at which both the stretch and the Whitehead graph of phi(w_m) are stable."""
    k = phi.k
    m = stretch_factor(phi, size_cap=size_cap).m_used

    def graph(m):
        return whitehead_graph(phi.apply_cyclic(euler_word(k, m, size_cap).w), k)

    cur = graph(m)
    while euler_length(k, m + 1) <= size_cap:
        nxt = graph(m + 1)
        if all(b == a * (2 * k - 1) for a, b in zip(cur.labels, nxt.labels)):
            return m, True
        m, cur = m + 1, nxt
    return m, False


def _surrogate(phi: Automorphism, size_cap: int = EULER_SIZE_CAP):
    m, _ = surrogate_level(phi, size_cap)
    return phi.apply_cyclic(euler_word(phi.k, m, size_cap).w)


def phi_nA_graph(phi: Automorphism, size_cap: int = EULER_SIZE_CAP) -> NormalizedWhiteheadGraph:
    """Predicted limit of [Gamma_{phi(w)}] for long random w."""
    img = _surrogate(phi, size_cap)
    return normalize(whitehead_graph(img, phi.k), len(img))


def ideal_candidates(phi: Automorphism, size_cap: int = EULER_SIZE_CAP):
    """Whitehead pairs sorted by length change on phi(w_m), steepest first."""
    img = _surrogate(phi, size_cap)
    g = whitehead_graph(img, phi.k)
    scored = [(length_change(p, g), i, p) for i, p in enumerate(enumerate_wh2(phi.k))]
    scored.sort(key=lambda t: (t[0], t[1]))
    return [(c, p) for c, _, p in scored]


def ideal_step(phi: Automorphism, size_cap: int = EULER_SIZE_CAP) -> CharPair:
    """A Whitehead pair tau with L(tau phi n_A) < L(phi n_A).

    Takes the steepest decrease on the Euler-word surrogate, first in
    enumeration order on ties, and confirms the drop by recomputing the
    stretching factor of tau o phi.
    """
    if is_simple(phi):
        raise IdealError(f"{phi} is simple; no Whitehead automorphism lowers its stretch")
    lam = stretch_factor(phi, size_cap=size_cap).value
    for change, p in ideal_candidates(phi, size_cap):
        if change >= 0:
            break
        if stretch_factor(compose(wh2_images(p, phi.k), phi), size_cap=size_cap).value < lam:
            return p
    raise IdealError(f"no decreasing Whitehead automorphism found for {phi}")


@dataclass
class Factorization:
    """phi = sigmas[-1] o ... o sigmas[0] o alpha."""

    phi: Automorphism
    sigmas: list[CharPair]
    alpha: Automorphism
    L_sequence: list[Fraction]
    taus: list[CharPair] = field(default_factory=list)

    def psi(self, i: int) -> Automorphism:
        """psi_i = sigma_i o ... o sigma_1 o alpha."""
        out = self.alpha
        for p in self.sigmas[:i]:
            out = compose(wh2_images(p, self.phi.k), out)
        return out

    def reconstruct(self) -> Automorphism:
        return self.psi(len(self.sigmas))

    def to_dict(self) -> dict:
        return {
            "phi": self.phi.to_dict(),
            "sigmas": [p.to_dict() for p in self.sigmas],
            "alpha": self.alpha.to_dict(),
            "L_sequence": [{"num": x.numerator, "den": x.denominator} for x in self.L_sequence],
            "taus": [p.to_dict() for p in self.taus],
        }


def factorize(
    phi: Automorphism, max_steps: int = DEFAULT_MAX_STEPS, size_cap: int = EULER_SIZE_CAP
) -> Factorization:
    """Split phi into Whitehead automorphisms of the second kind over a simple one.

    Repeats :func:`ideal_step` on tau_i ... tau_1 phi until the result is
    simple.  Hitting ``max_steps`` first raises :class:`IdealError`.
    """
    k = phi.k
    taus = []
    lams = [stretch_factor(phi, size_cap=size_cap).value]
    cur = phi
    while not is_simple(cur):
        if len(taus) >= max_steps:
            raise IdealError(f"factorization did not finish within {max_steps} steps")
        p = ideal_step(cur, size_cap)
        taus.append(p)
        cur = compose(wh2_images(p, k), cur)
        lams.append(stretch_factor(cur, size_cap=size_cap).value)
    if lams[-1] != 1:
        raise IdealError(f"simple automorphism with stretch {lams[-1]} != 1")
    sigmas = [invert_pair(p, k) for p in reversed(taus)]
    fact = Factorization(phi, sigmas, cur, list(reversed(lams)), taus)
    if fact.reconstruct().images != phi.images:
        raise AutomorphismError("factorization does not reproduce phi")
    if any(a >= b for a, b in zip(fact.L_sequence, fact.L_sequence[1:])):
        raise IdealError(f"stretch sequence not increasing: {fact.L_sequence}")
    return fact
