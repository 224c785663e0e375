"""Reduced and cyclic words in the free group on two generators.

Words are tuples of :class:`Letter`.  The text syntax is ``a``, ``b`` for the
generators and ``A``, ``B`` for their inverses, so ``"abAB"`` is the
commutator.  Conjugacy classes are represented by :class:`CyclicWord`, which
stores the lexicographically least rotation under the order a < b < A < B.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from sicgram import _kernels


class Letter(enum.IntEnum):
    a = 0
    b = 1
    A = 2
    B = 3

    @property
    def generator_index(self) -> int:
        return self & 1

    @property
    def sign(self) -> int:
        return -1 if self & 2 else 1

    @property
    def inverse(self) -> Letter:
        return LETTERS[self ^ 2]

    @classmethod
    def from_parts(cls, generator_index: int, sign: int) -> Letter:
        if generator_index not in (0, 1) or sign not in (1, -1):
            raise ValueError(f"no letter with generator {generator_index} and sign {sign}")
        return LETTERS[generator_index | (2 if sign < 0 else 0)]

    def __str__(self) -> str:
        return self.name


LETTERS = tuple(Letter)
_BY_CHAR = {str(x): x for x in LETTERS}


class WordParseError(ValueError):
    """Raised for text containing characters outside ``abAB``."""

    def __init__(self, text: str, position: int):
        self.text = text
        self.position = position  # 1-based
        super().__init__(
            f"invalid character {text[position - 1]!r} at position {position} "
            f"(expected one of a, b, A, B)"
        )


def parse_word(text: str) -> tuple[Letter, ...]:
    """Parse ``text`` into letters without reducing it."""
    out = []
    for i, ch in enumerate(text):
        x = _BY_CHAR.get(ch)
        if x is None:
            raise WordParseError(text, i + 1)
        out.append(x)
    return tuple(out)


def format_word(letters: Iterable[int]) -> str:
    return "".join(LETTERS[x].name for x in letters)


def invert(letters: Sequence[int]) -> tuple[Letter, ...]:
    """Inverse of a word as a letter sequence (reverse and invert each letter)."""
    return tuple(LETTERS[x ^ 2] for x in reversed(letters))


def free_reduce(seq: Iterable[int]) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for x in seq:
        if out and out[-1] == x ^ 2:
            out.pop()
        else:
            out.append(LETTERS[x])
    return tuple(out)


def is_reduced(seq: Sequence[int]) -> bool:
    return all(seq[i] != seq[i - 1] ^ 2 for i in range(1, len(seq)))


def is_cyclically_reduced(seq: Sequence[int]) -> bool:
    if not seq:
        return True
    return is_reduced(seq) and (len(seq) == 1 or seq[0] != seq[-1] ^ 2)


def least_rotation(seq: Sequence[int]) -> int:
    """Start index of the lexicographically least rotation (Booth's algorithm)."""
    s = list(seq) * 2
    n = len(seq)
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        x = s[j]
        i = f[j - k - 1]
        while i != -1 and x != s[k + i + 1]:
            if x < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if i == -1 and x != s[k + i + 1]:
            if x < s[k + i + 1]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k % n if n else 0


def smallest_period(seq: Sequence[int]) -> int:
    """Smallest ``d`` dividing ``len(seq)`` such that ``seq`` is a power of its ``d``-prefix."""
    n = len(seq)
    if n == 0:
        raise ValueError("empty word has no period")
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and seq[i] != seq[k]:
            k = fail[k - 1]
        if seq[i] == seq[k]:
            k += 1
        fail[i] = k
    p = n - fail[-1]
    return p if n % p == 0 else n


def primitive_root(seq: Sequence[int]) -> tuple[tuple[Letter, ...], int]:
    """Return ``(root, exponent)`` with ``seq == root * exponent``."""
    p = smallest_period(seq)
    return tuple(LETTERS[x] for x in seq[:p]), len(seq) // p


@dataclass(frozen=True)
class CyclicWord:
    """A conjugacy class, stored as its canonical cyclically reduced word."""

    letters: tuple[Letter, ...]
    primitive: bool

    @classmethod
    def from_letters(cls, seq: Sequence[int]) -> CyclicWord:
        """Canonicalize a cyclically reduced sequence (any rotation)."""
        return canonical_rotation(seq)

    @classmethod
    def parse(cls, text: str) -> CyclicWord:
        """Parse arbitrary text and return the class of the element it spells."""
        return cyclic_reduce(parse_word(text))[1]

    @classmethod
    def _trusted(cls, letters: tuple[Letter, ...], primitive: bool) -> CyclicWord:
        obj = object.__new__(cls)
        object.__setattr__(obj, "letters", letters)
        object.__setattr__(obj, "primitive", primitive)
        return obj

    @property
    def length(self) -> int:
        return len(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return format_word(self.letters)


def canonical_rotation(seq: Sequence[int]) -> CyclicWord:
    if not is_cyclically_reduced(seq):
        raise ValueError(f"{format_word(seq)!r} is not cyclically reduced")
    if not seq:
        return CyclicWord._trusted((), True)
    k = least_rotation(seq)
    letters = tuple(LETTERS[x] for x in (*seq[k:], *seq[:k]))
    return CyclicWord._trusted(letters, smallest_period(letters) == len(letters))


def cyclic_reduce(w: Sequence[int]) -> tuple[tuple[Letter, ...], CyclicWord]:
    """Split a word into ``(conjugator, core)``.

    The input is freely reduced first.  ``w`` equals ``conjugator * c *
    conjugator**-1`` where ``c`` is a rotation of ``core.letters``.
    """
    w = free_reduce(w)
    k = 0
    while 2 * k + 1 < len(w) and w[k] == w[-1 - k] ^ 2:
        k += 1
    core = w[k : len(w) - k]
    return w[:k], canonical_rotation(core)


def inverse(w: CyclicWord) -> CyclicWord:
    return canonical_rotation(invert(w.letters))


def is_primitive(w: CyclicWord | Sequence[int]) -> bool:
    letters = w.letters if isinstance(w, CyclicWord) else w
    if not letters:
        raise ValueError("primitivity is undefined for the empty word")
    return smallest_period(letters) == len(letters)


# -- counting ---------------------------------------------------------------


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _mobius(n: int) -> int:
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def _totient(n: int) -> int:
    result = n
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


def cyclically_reduced_count(d: int) -> int:
    """Number of cyclically reduced words of length ``d`` (the trace of T**d)."""
    return 3**d + 2 + (-1) ** d


def count_classes(n: int, primitive_only: bool = True) -> int:
    """Exact number of conjugacy classes of combinatorial length ``n``."""
    if n < 1:
        raise ValueError(f"length must be positive, got {n}")
    weight = _mobius if primitive_only else _totient
    total = sum(weight(n // d) * cyclically_reduced_count(d) for d in _divisors(n))
    assert total % n == 0
    return total // n


# -- enumeration ------------------------------------------------------------


class NecklaceWalk:
    """Resumable lexicographic walk over the canonical words of length ``n``.

    ``prefix`` restricts the walk to canonical words starting with it.
    Words come out in batches as rows of a ``uint8`` array, which is what the
    census engine consumes directly.
    """

    def __init__(
        self,
        n: int,
        prefix: Sequence[int] = (),
        include_powers: bool = False,
        start_after: Sequence[int] | None = None,
    ):
        if n < 1:
            raise ValueError(f"length must be positive, got {n}")
        if len(prefix) > n:
            raise ValueError(f"prefix {format_word(prefix)!r} is longer than {n}")
        if not is_reduced(prefix):
            raise ValueError(f"prefix {format_word(prefix)!r} is not reduced")
        self.n = n
        self.prefix = np.asarray(prefix, dtype=np.int64)
        self.include_powers = include_powers
        self._a = np.zeros(n + 2, dtype=np.int64)
        self._P = np.zeros(n + 2, dtype=np.int64)
        self._state = np.zeros(1, dtype=np.int64)
        if start_after is None:
            _kernels.reset_walk(self._a, self._P, self._state)
        else:
            if len(start_after) != n or tuple(start_after[: len(prefix)]) != tuple(prefix):
                raise ValueError(
                    f"cursor {format_word(start_after)!r} does not belong to this walk"
                )
            _kernels.seek_walk(
                self._a, self._P, self._state, np.asarray(start_after, dtype=np.int64)
            )

    @property
    def exhausted(self) -> bool:
        return self._state[0] == 0

    def fill(self, out: np.ndarray) -> int:
        """Write the next words into the rows of ``out``; return how many."""
        return _kernels.fill_necklaces(
            self._a, self._P, self._state, self.n, self.prefix, out, self.include_powers
        )

    def batches(self, size: int = 4096) -> Iterator[np.ndarray]:
        buf = np.empty((size, self.n), dtype=np.uint8)
        while not self.exhausted:
            got = self.fill(buf)
            if got:
                yield buf[:got]


def enumerate_classes(
    n: int,
    prefix: Sequence[int] | None = None,
    include_powers: bool = False,
) -> Iterator[CyclicWord]:
    """Yield every canonical cyclic word of length ``n`` in lexicographic order.

    Only primitive classes are produced unless ``include_powers`` is set.
    """
    walk = NecklaceWalk(n, prefix or (), include_powers=include_powers)
    for batch in walk.batches():
        for row in batch.tolist():
            letters = tuple(LETTERS[x] for x in row)
            primitive = not include_powers or smallest_period(letters) == n
            yield CyclicWord._trusted(letters, primitive)


def reduced_prefixes(k: int) -> list[tuple[Letter, ...]]:
    """All reduced words of length ``k`` in lexicographic order."""
    out: list[tuple[Letter, ...]] = [()]
    for _ in range(k):
        out = [w + (x,) for w in out for x in LETTERS if not w or x != w[-1] ^ 2]
    return out


# -- fixtures and automorphisms ---------------------------------------------


def christoffel(p: int, q: int, signs: tuple[int, int] = (1, 1)) -> CyclicWord:
    """Christoffel word of slope ``p/q``: ``q`` copies of ``a`` and ``p`` of ``b``.

    The word follows the lattice path from (0, 0) to (q, p) staying just
    below the segment; ``signs`` selects ``a`` or ``A`` and ``b`` or ``B``.
    """
    if p < 0 or q < 0 or p + q < 1:
        raise ValueError(f"need non-negative p, q with p + q >= 1, got {p}, {q}")
    if math.gcd(p, q) != 1:
        raise ValueError(f"gcd({p}, {q}) != 1")
    x = Letter.from_parts(0, signs[0])
    y = Letter.from_parts(1, signs[1])
    n = p + q
    letters = [y if (i * p) // n != ((i - 1) * p) // n else x for i in range(1, n + 1)]
    return canonical_rotation(letters)


def substitute(seq: Sequence[int], images: Mapping[int, Sequence[int]]) -> tuple[Letter, ...]:
    """Apply the endomorphism sending generator ``g`` to ``images[g]``, then reduce."""
    out: list[int] = []
    for x in seq:
        img = images[x & 1]
        out.extend(img if x < 2 else invert(img))
    return free_reduce(out)


a, b, A, B = LETTERS
SWAP_AB = {0: (b,), 1: (a,)}
INVERT_A = {0: (A,), 1: (b,)}
TRANSVECTION = {0: (a, b), 1: (b,)}
AUTOMORPHISM_GENERATORS = (SWAP_AB, INVERT_A, TRANSVECTION)
