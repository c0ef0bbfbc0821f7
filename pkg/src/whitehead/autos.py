"""Free group automorphisms given by basis images, and Whitehead automorphisms.

An :class:`Automorphism` stores the images of ``a_1..a_k``.  Whitehead
automorphisms of the second kind are described by a :class:`CharPair`
``(T, a)`` and turned into basis images by :func:`wh2_images`; relabelings
are built from a signed permutation by :func:`relabeling`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .core import (
    CyclicWord,
    Letter,
    MAX_RANK,
    Word,
    WordError,
    alphabet,
    cyclic_reduce,
    free_reduce,
    letter_key,
    letter_str,
    parse_letter,
    rank_of,
    word_str,
)


class AutomorphismError(ValueError):
    pass


class LiteralError(AutomorphismError):
    """A malformed automorphism literal (as opposed to a non-automorphism)."""


@dataclass(frozen=True)
class CharPair:
    """Characteristic pair (T, a) of a Whitehead automorphism of the second kind."""

    T: frozenset
    a: Letter

    def __post_init__(self):
        object.__setattr__(self, "T", frozenset(self.T))
        if self.a not in self.T:
            raise AutomorphismError(f"multiplier {letter_str(self.a)} must lie in T")
        if -self.a in self.T:
            raise AutomorphismError(f"T must not contain {letter_str(-self.a)}")
        if 0 in self.T:
            raise AutomorphismError("0 is not a letter")

    def __str__(self) -> str:
        members = ",".join(letter_str(x) for x in sorted(self.T, key=letter_key))
        return f"wh2(T={{{members}}}; m={letter_str(self.a)})"

    def to_dict(self) -> dict:
        return {
            "T": [letter_str(x) for x in sorted(self.T, key=letter_key)],
            "m": letter_str(self.a),
        }


class Automorphism:
    """Endomorphism of F_k given by the images of the generators.

    ``images[i]`` is the image of ``a_{i+1}``.  When ``inverse_images`` is
    given the two maps are checked to be mutually inverse, which certifies
    the map is an automorphism.
    """

    __slots__ = ("k", "images", "inverse_images", "_letter_images")

    def __init__(self, images: Sequence[Sequence[Letter]], inverse_images=None):
        self.k = len(images)
        if self.k < 1:
            raise AutomorphismError("need at least one generator image")
        self.images = tuple(free_reduce(w) for w in images)
        for w in self.images:
            if rank_of(w) > self.k:
                raise AutomorphismError(f"image {word_str(w)} uses letters beyond rank {self.k}")
        self._letter_images = _letter_table(self.images)
        self.inverse_images = None
        if inverse_images is not None:
            inv = tuple(free_reduce(w) for w in inverse_images)
            if len(inv) != self.k:
                raise AutomorphismError("inverse has the wrong rank")
            other = Automorphism(inv)
            for i in range(1, self.k + 1):
                if self.apply(other.apply((i,))) != (i,) or other.apply(self.apply((i,))) != (i,):
                    raise AutomorphismError("supplied inverse does not invert the map")
            self.inverse_images = inv

    @classmethod
    def identity(cls, k: int) -> "Automorphism":
        gens = [(i,) for i in range(1, k + 1)]
        return cls(gens, gens)

    @classmethod
    def parse(cls, text: str, k: int | None = None) -> "Automorphism":
        return parse_automorphism(text, k)

    def image(self, x: Letter) -> Word:
        return self._letter_images[x]

    def apply(self, w: Iterable[Letter]) -> Word:
        """Freely reduced image of a word."""
        table = self._letter_images
        stack: list[Letter] = []
        for x in w:
            try:
                img = table[x]
            except KeyError:
                raise WordError(
                    f"letter {letter_str(x)} outside rank {self.k}"
                ) from None
            for y in img:
                if stack and stack[-1] == -y:
                    stack.pop()
                else:
                    stack.append(y)
        return Word(stack)

    def apply_cyclic(self, w: CyclicWord) -> CyclicWord:
        return cyclic_reduce(self.apply(w.letters))[0]

    def cyclic_length_of(self, w: CyclicWord) -> int:
        """||phi(w)|| without building the canonical rotation."""
        u = self.apply(w.letters)
        n = len(u)
        i = 0
        while i < n - 1 - i and u[i] == -u[n - 1 - i]:
            i += 1
        return n - 2 * i

    __call__ = apply

    def max_image_length(self) -> int:
        return max(len(w) for w in self.images)

    def is_identity(self) -> bool:
        return all(w == (i,) for i, w in enumerate(self.images, 1))

    def __eq__(self, other) -> bool:
        return isinstance(other, Automorphism) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __str__(self) -> str:
        return ", ".join(
            f"{letter_str(i)}->{word_str(w)}" for i, w in enumerate(self.images, 1)
        )

    def __repr__(self) -> str:
        return f"Automorphism({str(self)!r})"

    def to_dict(self) -> dict:
        return {letter_str(i): word_str(w) for i, w in enumerate(self.images, 1)}


def _letter_table(images) -> dict[Letter, Word]:
    table = {}
    for i, w in enumerate(images, 1):
        table[i] = w
        table[-i] = w.inverse()
    return table


def _check_rank(phi: Automorphism, psi: Automorphism):
    if phi.k != psi.k:
        raise AutomorphismError(f"rank mismatch: {phi.k} vs {psi.k}")


def apply(phi: Automorphism, w: Iterable[Letter]) -> Word:
    return phi.apply(w)


def apply_cyclic(phi: Automorphism, w: CyclicWord) -> CyclicWord:
    return phi.apply_cyclic(w)


def compose(phi: Automorphism, psi: Automorphism) -> Automorphism:
    """The automorphism x -> phi(psi(x))."""
    _check_rank(phi, psi)
    images = [phi.apply(w) for w in psi.images]
    inv = None
    if phi.inverse_images is not None and psi.inverse_images is not None:
        psi_inv = Automorphism(psi.inverse_images)
        inv = [psi_inv.apply(w) for w in phi.inverse_images]
    return Automorphism(images, inv)


def compose_all(*autos: Automorphism) -> Automorphism:
    """compose_all(f, g, h) is f o g o h."""
    out = autos[-1]
    for f in reversed(autos[:-1]):
        out = compose(f, out)
    return out


def invert(phi: Automorphism) -> Automorphism:
    if phi.inverse_images is None:
        raise AutomorphismError(f"no inverse known for {phi}")
    return Automorphism(phi.inverse_images, phi.images)


def wh2_images(p: CharPair, k: int) -> Automorphism:
    """The Whitehead automorphism with characteristic pair ``p`` in rank k."""
    a = p.a
    if rank_of(p.T) > k:
        raise AutomorphismError(f"{p} does not fit in rank {k}")
    images = []
    inverse = []
    for i in range(1, k + 1):
        if i == abs(a):
            images.append((i,))
            inverse.append((i,))
            continue
        # tau(x) = u x v with u, v in {1, a^-1} / {1, a}
        left = (-a,) if -i in p.T else ()
        right = (a,) if i in p.T else ()
        images.append(left + (i,) + right)
        # tau fixes a, so the inverse just swaps a for a^-1
        inverse.append(tuple(-y for y in left) + (i,) + tuple(-y for y in right))
    return Automorphism(images, inverse)


def invert_pair(p: CharPair, k: int) -> CharPair:
    """Characteristic pair of the inverse Whitehead automorphism."""
    q = CharPair((p.T - {p.a}) | {-p.a}, -p.a)
    if wh2_images(q, k).images != invert(wh2_images(p, k)).images:
        raise AutomorphismError(f"inverse pair of {p} failed verification")
    return q


@lru_cache(maxsize=None)
def enumerate_wh2(k: int) -> tuple[CharPair, ...]:
    """All characteristic pairs in rank k.

    Multipliers run backwards through a < A < b < B < ... (so the last
    inverse generator comes first); for each multiplier the subsets
    S = T - {a} follow the bitmask order over the remaining letters.
    """
    if k < 2:
        raise AutomorphismError("Whitehead automorphisms are enumerated for k >= 2")
    out = []
    sigma = alphabet(k)
    for a in reversed(sigma):
        rest = [x for x in sigma if x not in (a, -a)]
        for mask in range(1 << len(rest)):
            S = {x for j, x in enumerate(rest) if mask >> j & 1}
            out.append(CharPair(frozenset(S | {a}), a))
    return tuple(out)


def is_inner_wh2(p: CharPair, k: int) -> bool:
    """True for the identity pair and for conjugation by the multiplier."""
    return p.T == {p.a} or p.T == set(alphabet(k)) - {-p.a}


def relabeling(perm: Mapping[Letter, Letter], k: int | None = None) -> Automorphism:
    """Relabeling given by where (some) generators go; others are fixed."""
    if k is None:
        k = rank_of(list(perm) + list(perm.values()))
    t = {i: i for i in range(1, k + 1)}
    for x, y in perm.items():
        if x < 0:
            x, y = -x, -y
        t[x] = y
    targets = sorted(abs(y) for y in t.values())
    if targets != list(range(1, k + 1)):
        raise AutomorphismError("not a permutation of the generators")
    images = [(t[i],) for i in range(1, k + 1)]
    inv = [None] * k
    for i, y in t.items():
        inv[abs(y) - 1] = (i if y > 0 else -i,)
    return Automorphism(images, inv)


@lru_cache(maxsize=None)
def all_relabelings(k: int) -> tuple[Automorphism, ...]:
    """The 2^k k! relabeling automorphisms (identity first)."""
    out = []
    gens = range(1, k + 1)
    for p in itertools.permutations(gens):
        for signs in itertools.product((1, -1), repeat=k):
            out.append(relabeling({i: s * j for i, j, s in zip(gens, p, signs)}, k))
    return tuple(out)


def inner(g: Iterable[Letter], k: int) -> Automorphism:
    """Conjugation x -> g^-1 x g."""
    g = free_reduce(g)
    if rank_of(g) > k:
        raise AutomorphismError("conjugator outside rank")
    gi = g.inverse()
    images = [free_reduce(gi + (i,) + g) for i in range(1, k + 1)]
    inv = [free_reduce(g + (i,) + gi) for i in range(1, k + 1)]
    return Automorphism(images, inv)


def is_simple(phi: Automorphism) -> bool:
    """Whether phi is a relabeling composed with an inner automorphism.

    The rank-k Euler word of level 2 is strictly minimal, so any phi that
    keeps its cyclic length is simple.
    """
    from .currents import euler_word

    w = euler_word(phi.k, 2).w
    return phi.cyclic_length_of(w) == len(w)


# --- literal syntax -------------------------------------------------------

_WH2_RE = re.compile(r"^wh2\(\s*T\s*=\s*\{([^}]*)\}\s*;\s*m\s*=\s*([A-Za-z])\s*\)$")
_PERM_RE = re.compile(r"^perm\((.*)\)$")
_INNER_RE = re.compile(r"^inner\(\s*([A-Za-z1]+)\s*\)$")


def _parse_pairs(body: str) -> dict[Letter, Word]:
    out = {}
    for part in body.split(","):
        part = part.strip()
        if not part:
            continue
        if "->" not in part:
            raise LiteralError(f"expected 'x->word', got {part!r}")
        lhs, rhs = (s.strip() for s in part.split("->", 1))
        if len(lhs) != 1:
            raise LiteralError(f"left side must be a single letter: {lhs!r}")
        x = parse_letter(lhs)
        w = Word.parse(rhs)
        if not w:
            raise AutomorphismError(f"{lhs} has a trivial image; not an automorphism")
        if x < 0:
            x, w = -x, w.inverse()
        if x in out:
            raise LiteralError(f"generator {letter_str(x)} given twice")
        out[x] = w
    return out


def parse_char_pair(text: str) -> CharPair:
    m = _WH2_RE.match(text.strip())
    if not m:
        raise LiteralError(f"bad wh2 literal: {text!r}")
    members = [parse_letter(c.strip()) for c in m.group(1).split(",") if c.strip()]
    return CharPair(frozenset(members), parse_letter(m.group(2)))


def parse_automorphism(text: str, k: int | None = None) -> Automorphism:
    """Parse an automorphism literal.

    Accepted forms::

        a->ab, b->b              basis images (unlisted generators fixed)
        a->ab, b->b | a->aB      basis images with a certifying inverse
        wh2(T={a,B}; m=B)        Whitehead automorphism of the second kind
        perm(a->b, b->a)         relabeling
        inner(ab)                conjugation x -> (ab)^-1 x ab
        id                       identity

    Several literals joined by `` * `` are composed, leftmost applied last.
    """
    text = text.strip()
    if " * " in text:
        parts = [parse_automorphism(t, k) for t in text.split(" * ")]
        kk = max(p.k for p in parts)
        parts = [p if p.k == kk else _extend(p, kk) for p in parts]
        return compose_all(*parts)
    body = "" if text == "id" else re.sub(r"^(wh2|perm|inner)|[Tm]\s*=", "", text)
    need = rank_of(parse_letter(c) for c in body if c.isalpha())
    if k is None:
        k = max(need, 2)
    if need > k:
        raise LiteralError(f"literal uses letters beyond rank {k}: {text!r}")
    if k > MAX_RANK:
        raise LiteralError(f"rank {k} exceeds {MAX_RANK}")
    if text == "id":
        return Automorphism.identity(k)
    if text.startswith("wh2"):
        return wh2_images(parse_char_pair(text), k)
    m = _PERM_RE.match(text)
    if m:
        pairs = _parse_pairs(m.group(1))
        perm = {}
        for x, w in pairs.items():
            if len(w) != 1:
                raise LiteralError("perm images must be single letters")
            perm[x] = w[0]
        return relabeling(perm, k)
    m = _INNER_RE.match(text)
    if m:
        return inner(Word.parse(m.group(1)), k)
    forward, _, backward = text.partition("|")
    fwd = _parse_pairs(forward)
    images = [fwd.get(i, Word((i,))) for i in range(1, k + 1)]
    inv = None
    if backward.strip():
        bwd = _parse_pairs(backward)
        inv = [bwd.get(i, Word((i,))) for i in range(1, k + 1)]
    return Automorphism(images, inv)


def _extend(phi: Automorphism, k: int) -> Automorphism:
    extra = [(i,) for i in range(phi.k + 1, k + 1)]
    inv = None if phi.inverse_images is None else list(phi.inverse_images) + extra
    return Automorphism(list(phi.images) + extra, inv)
