"""Letters, reduced words, cyclic words and random sampling.

Letters are nonzero integers: ``i`` stands for the generator ``a_i`` and
``-i`` for its inverse.  In text form generator ``i`` is the ``i``-th
lowercase ASCII letter and its inverse the matching uppercase letter, so
``"abAB"`` is the commutator ``a b a^-1 b^-1``.  The empty word prints as
``"1"``.
"""

from __future__ import annotations

import string
from typing import Iterable, Sequence

import numpy as np

MAX_RANK = 26
# longest v (in multiples of ||w||) that count_occurrences will read around w
MAX_WRAPS = 32

Letter = int


class WordError(ValueError):
    """Raised for malformed or out-of-range words."""


def inverse(x: Letter) -> Letter:
    return -x


def alphabet(k: int) -> list[Letter]:
    """Sigma for rank k in the fixed total order a < A < b < B < ..."""
    out = []
    for i in range(1, k + 1):
        out += [i, -i]
    return out


def letter_key(x: Letter) -> int:
    return 2 * (abs(x) - 1) + (x < 0)


def letter_str(x: Letter) -> str:
    if x > 0:
        return string.ascii_lowercase[x - 1]
    return string.ascii_uppercase[-x - 1]


def parse_letter(c: str) -> Letter:
    if c in string.ascii_lowercase:
        return string.ascii_lowercase.index(c) + 1
    if c in string.ascii_uppercase:
        return -(string.ascii_uppercase.index(c) + 1)
    raise WordError(f"not a letter: {c!r}")


def rank_of(letters: Iterable[Letter]) -> int:
    """Smallest rank containing every letter (0 for the empty word)."""
    return max((abs(x) for x in letters), default=0)


class Word(tuple):
    """A freely reduced word; a tuple of letters.

    Construction checks reducedness.  Use :func:`free_reduce` to build a
    word from an arbitrary letter sequence.
    """

    __slots__ = ()

    def __new__(cls, letters: Iterable[Letter] = ()):
        self = super().__new__(cls, letters)
        for i, x in enumerate(self):
            if not isinstance(x, (int, np.integer)) or x == 0:
                raise WordError(f"bad letter {x!r}")
            if i and self[i - 1] == -x:
                raise WordError(f"word is not freely reduced: {word_str(self)}")
        return self

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse and free-reduce a word literal."""
        return free_reduce(parse_letters(text))

    def inverse(self) -> "Word":
        return _word([-x for x in reversed(self)])

    def __mul__(self, other):
        return free_reduce(tuple(self) + tuple(other))

    def __str__(self) -> str:
        return word_str(self)

    def __repr__(self) -> str:
        return f"Word({word_str(self)!r})"


def _word(letters) -> Word:
    # skips the reducedness check; callers guarantee it
    return tuple.__new__(Word, letters)


def parse_letters(text: str) -> list[Letter]:
    text = text.strip()
    if text == "1":
        return []
    return [parse_letter(c) for c in text if not c.isspace()]


def word_str(letters: Sequence[Letter]) -> str:
    if not letters:
        return "1"
    return "".join(letter_str(x) for x in letters)


def free_reduce(raw: Iterable[Letter]) -> Word:
    """Cancel adjacent inverse pairs until none are left."""
    stack: list[Letter] = []
    for x in raw:
        if x == 0:
            raise WordError("0 is not a letter")
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return _word(stack)


def is_cyclically_reduced(letters: Sequence[Letter]) -> bool:
    n = len(letters)
    if n == 0:
        return False
    return all(letters[i] != -letters[i - 1] for i in range(n))


def least_rotation(keys: Sequence[int]) -> int:
    """Start index of the lexicographically least rotation (Booth)."""
    n = len(keys)
    if n == 0:
        return 0
    s = list(keys) * 2
    f = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:  # i == -1
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


class CyclicWord:
    """A cyclically reduced word up to rotation.

    ``letters`` is always the least rotation under the letter order
    a < A < b < B < ..., so equality and hashing are by conjugacy class.
    """

    __slots__ = ("letters", "_hash")

    def __init__(self, letters: Iterable[Letter]):
        letters = tuple(letters)
        if not is_cyclically_reduced(letters):
            raise WordError(f"not a nonempty cyclically reduced word: {word_str(letters)}")
        r = least_rotation([letter_key(x) for x in letters])
        self.letters = letters[r:] + letters[:r]
        self._hash = hash(self.letters)

    @classmethod
    def parse(cls, text: str) -> "CyclicWord":
        return cyclic_reduce(Word.parse(text))[0]

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, CyclicWord) and self.letters == other.letters

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return word_str(self.letters)

    def __repr__(self) -> str:
        return f"CyclicWord({str(self)!r})"

    def word(self) -> Word:
        """Canonical linear representative."""
        return _word(self.letters)


def cyclic_core(w: Sequence[Letter]) -> tuple[Word, Word]:
    """Split a reduced word as ``c u c^-1`` with ``u`` cyclically reduced.

    Returns ``(u, c)``.
    """
    n = len(w)
    i = 0
    while i < n - 1 - i and w[i] == -w[n - 1 - i]:
        i += 1
    return _word(w[i:n - i]), _word(w[:i])


def cyclic_reduce(w: Sequence[Letter]) -> tuple[CyclicWord, Word]:
    """Cyclic word of ``w`` and the conjugator ``c`` with ``w = c u c^-1``."""
    w = free_reduce(w)
    if not w:
        raise WordError("the trivial word has no cyclic reduction")
    u, c = cyclic_core(w)
    return CyclicWord(u), c


def cyclic_length(w: Sequence[Letter]) -> int:
    """||w|| for a freely reduced (linear) word."""
    return len(cyclic_core(w)[0])


def count_occurrences(v: Sequence[Letter], w: CyclicWord) -> int:
    """Number of positions on the circle of ``w`` where ``v`` can be read.

    ``v`` may be longer than ``w``; reading then wraps around the circle.
    """
    m = len(v)
    if m == 0:
        raise WordError("cannot count occurrences of the empty word")
    letters = w.letters
    n = len(letters)
    if m > MAX_WRAPS * n:
        raise WordError(f"|v| = {m} exceeds {MAX_WRAPS} wraps of a length-{n} cyclic word")
    reps = -(-(m + n) // n)
    ext = letters * reps
    v = tuple(v)
    return sum(1 for i in range(n) if ext[i:i + m] == v)


def window_counts(w: CyclicWord, m: int) -> dict[tuple, int]:
    """Map every length-m word readable on ``w`` to its occurrence count."""
    letters = w.letters
    n = len(letters)
    if m > MAX_WRAPS * n:
        raise WordError(f"m = {m} exceeds {MAX_WRAPS} wraps of a length-{n} cyclic word")
    reps = -(-(m + n) // n)
    ext = letters * reps
    out: dict[tuple, int] = {}
    for i in range(n):
        key = ext[i:i + m]
        out[key] = out.get(key, 0) + 1
    return out


def reduced_words(k: int, m: int) -> list[Word]:
    """All reduced words of length m, in lexicographic letter order."""
    sigma = alphabet(k)
    words: list[tuple] = [()]
    for _ in range(m):
        words = [w + (x,) for w in words for x in sigma if not w or w[-1] != -x]
    return [_word(w) for w in words]


def make_rng(seed: int | None = None) -> np.random.Generator:
    return np.random.default_rng(seed)


def _index_to_letters(idx: np.ndarray, k: int) -> list[Letter]:
    # index i < k -> generator i+1, index k+i -> its inverse
    return [int(i) + 1 if i < k else k - int(i) - 1 for i in idx]


def sample_reduced(n: int, rng: np.random.Generator, k: int = 2) -> Word:
    """Uniformly random reduced word of length n.

    First letter uniform over the 2k letters, each later one uniform over
    the 2k-1 letters that do not cancel.
    """
    if n < 0:
        raise WordError("length must be nonnegative")
    if n == 0:
        return _word(())
    first = rng.integers(2 * k)
    # next = inverse(prev) + d (mod 2k) with d in 1..2k-1; inverse(i) = i + k
    steps = k + rng.integers(1, 2 * k, size=n - 1)
    idx = (first + np.concatenate(([0], np.cumsum(steps)))) % (2 * k)
    return _word(_index_to_letters(idx, k))


def sample_cyclically_reduced(n: int, rng: np.random.Generator, k: int = 2) -> CyclicWord:
    """Uniformly random cyclically reduced word of length n (by rejection)."""
    return _sample_cyclically_reduced(n, rng, k)[0]


def _sample_cyclically_reduced(n: int, rng, k: int) -> tuple[CyclicWord, int]:
    if n < 1:
        raise WordError("cyclically reduced words have length >= 1")
    tries = 0
    while True:
        tries += 1
        w = sample_reduced(n, rng, k)
        if n == 1 or w[-1] != -w[0]:
            return CyclicWord(w), tries
