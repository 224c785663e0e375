"""Self-intersection numbers of primitive classes on the punctured torus.

Each letter position ``i`` of a cyclic word ``w`` is a strand: the lift of
the curve through the basepoint of the Cayley tree, leaving along ``w[i]``
and arriving along ``w[i-1]``.  Its two ends are periodic infinite reduced
words (rays).  The cyclic order of the four letters around the puncture
orders the boundary at infinity, and two strands cross exactly when their
endpoint pairs alternate on that circle.

Strands that share edges at the basepoint describe the same pair of lifts
more than once (once per vertex of their common segment).  The count below
gives every linked pair weight ``2 - shared``, where ``shared`` is the
number of edges at the basepoint the two strands have in common, and halves
the sum; each crossing then contributes exactly one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from sicgram import _kernels
from sicgram.words import (
    LETTERS,
    CyclicWord,
    Letter,
    format_word,
    is_cyclically_reduced,
    parse_word,
    smallest_period,
)


class NonPrimitiveError(ValueError):
    """The word is a proper power; its linked-pair count is not a crossing number."""


@dataclass(frozen=True)
class SurfaceOrder:
    """Cyclic order of the four directions around the basepoint.

    ``root_cut`` is the letter after which the cycle is cut to give the
    linear order used at depth zero.
    """

    cycle: tuple[Letter, ...]
    root_cut: Letter

    def __post_init__(self):
        if sorted(self.cycle) != list(LETTERS):
            raise ValueError(f"cycle must contain each of a, b, A, B once: {self.cycle}")
        if self.root_cut not in self.cycle:
            raise ValueError(f"root cut {self.root_cut} not in cycle")

    @classmethod
    def from_text(cls, text: str) -> SurfaceOrder:
        """``"abAB"`` is the cycle (a, b, A, B) cut after ``B``."""
        letters = parse_word(text)
        if len(letters) != 4:
            raise ValueError(f"surface order needs 4 letters, got {text!r}")
        return cls(letters, letters[-1])

    def to_text(self) -> str:
        """The linear order at the basepoint, i.e. the inverse of :meth:`from_text`."""
        k = self.cycle.index(self.root_cut) + 1
        return format_word(self.cycle[k:] + self.cycle[:k])

    @cached_property
    def rank_table(self) -> np.ndarray:
        """``rank_table[incoming, x]``: position of ``x`` after cutting just after ``incoming``."""
        where = {x: i for i, x in enumerate(self.cycle)}
        table = np.zeros((4, 4), dtype=np.int8)
        for inc in LETTERS:
            for x in LETTERS:
                table[inc, x] = (where[x] - where[inc] - 1) % 4
        return table

    @cached_property
    def root_ranks(self) -> np.ndarray:
        return self.rank_table[self.root_cut].copy()

    def relabel(self, images: dict[Letter, Letter]) -> SurfaceOrder:
        return SurfaceOrder(tuple(images[x] for x in self.cycle), images[self.root_cut])


#: Order around the puncture for the standard square gluing.  Pinned by the
#: simplicity tests (Christoffel words and the commutator have no crossings).
PUNCTURED_TORUS = SurfaceOrder.from_text("abAB")


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


class Comparison(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


@dataclass(frozen=True)
class Ray:
    """Infinite periodic word read from vertex ``phase`` of ``word``.

    Forward: ``w[i] w[i+1] ...``; backward: ``w[i-1]^-1 w[i-2]^-1 ...``.
    """

    word: tuple[Letter, ...]
    phase: int
    direction: Direction

    def letter(self, k: int) -> Letter:
        return ray_letter(self, k)


@dataclass(frozen=True)
class Strand:
    word: tuple[Letter, ...]
    index: int

    @property
    def neg(self) -> Ray:
        return Ray(self.word, self.index, Direction.BACKWARD)

    @property
    def pos(self) -> Ray:
        return Ray(self.word, self.index, Direction.FORWARD)


def strands(w: CyclicWord | Sequence[int]) -> list[Strand]:
    letters = _letters(w)
    return [Strand(letters, i) for i in range(len(letters))]


def ray_letter(r: Ray, k: int) -> Letter:
    n = len(r.word)
    if r.direction is Direction.FORWARD:
        return r.word[(r.phase + k) % n]
    return LETTERS[r.word[(r.phase - 1 - k) % n] ^ 2]


def compare_rays(x: Ray, y: Ray, order: SurfaceOrder = PUNCTURED_TORUS) -> Comparison:
    """Compare two rays of the same word by their points at infinity.

    Rays of a word of length ``n`` are periodic with period dividing ``n``,
    so agreement on ``n`` letters means the rays coincide.
    """
    n = len(x.word)
    if len(y.word) != n:
        raise ValueError("rays must come from words of the same length")
    table = order.rank_table
    incoming = order.root_cut
    for k in range(n):
        p = ray_letter(x, k)
        q = ray_letter(y, k)
        if p != q:
            return Comparison.LESS if table[incoming, p] < table[incoming, q] else Comparison.GREATER
        incoming = p ^ 2
    return Comparison.EQUAL


def linked(s: Strand, t: Strand, order: SurfaceOrder = PUNCTURED_TORUS) -> bool:
    """True when the endpoints of ``s`` and ``t`` alternate on the circle."""
    if s.index == t.index:
        raise ValueError("a strand is not linked with itself")
    rays = [(s.neg, 0), (s.pos, 0), (t.neg, 1), (t.pos, 1)]
    # insertion sort with the explicit comparator; four elements
    ranked: list[tuple[Ray, int]] = []
    for item in rays:
        at = len(ranked)
        for i, other in enumerate(ranked):
            c = compare_rays(item[0], other[0], order)
            if c is Comparison.EQUAL:
                raise NonPrimitiveError(
                    f"rays of {format_word(s.word)!r} coincide; is the word a proper power?"
                )
            if c is Comparison.LESS:
                at = i
                break
        ranked.insert(at, item)
    owners = [o for _, o in ranked]
    return owners[0] != owners[1] and owners[1] != owners[2]


def shared_edges(w: Sequence[int], i: int, j: int) -> int:
    """Edges at the basepoint common to the lifts of strands ``i`` and ``j``."""
    wi, wp = w[i], w[i - 1]
    wj, wq = w[j], w[j - 1]
    return (wi == wj) + (wp == wq) + (wi == wq ^ 2) + (wp == wj ^ 2)


def ray_key(w: Sequence[int], phase: int, forward: bool, order: SurfaceOrder) -> tuple[int, ...]:
    """Sort key of a ray: the rank of each letter in the order seen on arrival.

    Rays compare lexicographically by these keys exactly as
    :func:`compare_rays` orders them.
    """
    n = len(w)
    table = order.rank_table
    incoming = order.root_cut
    key = []
    for k in range(n):
        x = w[(phase + k) % n] if forward else w[(phase - 1 - k) % n] ^ 2
        key.append(int(table[incoming, x]))
        incoming = x ^ 2
    return tuple(key)


def _letters(w: CyclicWord | Sequence[int]) -> tuple[Letter, ...]:
    if isinstance(w, CyclicWord):
        return w.letters
    if isinstance(w, str):
        return parse_word(w)
    return tuple(LETTERS[x] for x in w)


def _check(letters: Sequence[int]) -> None:
    if not letters:
        raise ValueError("self-intersection is undefined for the empty word")
    if not is_cyclically_reduced(letters):
        raise ValueError(f"{format_word(letters)!r} is not cyclically reduced")
    if smallest_period(letters) != len(letters):
        raise NonPrimitiveError(f"{format_word(letters)!r} is a proper power")


def self_intersection(w: CyclicWord | Sequence[int], order: SurfaceOrder = PUNCTURED_TORUS) -> int:
    """Minimal number of self-crossings of the class of ``w``.

    ``w`` may be any rotation of a primitive cyclically reduced word.
    """
    letters = _letters(w)
    _check(letters)
    n = len(letters)
    keys = []
    for i in range(n):
        keys.append((ray_key(letters, i, False, order), 2 * i))
        keys.append((ray_key(letters, i, True, order), 2 * i + 1))
    keys.sort()
    pos = [0] * (2 * n)
    for rank, (_, ray) in enumerate(keys):
        pos[ray] = rank
    total = 0
    for i in range(n):
        lo, hi = sorted((pos[2 * i], pos[2 * i + 1]))
        for j in range(i + 1, n):
            if (lo < pos[2 * j] < hi) != (lo < pos[2 * j + 1] < hi):
                total += 2 - shared_edges(letters, i, j)
    return total // 2


def self_intersection_batch(
    words: np.ndarray, order: SurfaceOrder = PUNCTURED_TORUS, count: int | None = None
) -> np.ndarray:
    """Compiled :func:`self_intersection` over the rows of a ``uint8`` array.

    Rows must be primitive and cyclically reduced; a proper power raises.
    """
    words = np.ascontiguousarray(words, dtype=np.uint8)
    if count is None:
        count = words.shape[0]
    out = np.empty(count, dtype=np.int64)
    _kernels.batch_self_intersection(words, count, order.rank_table, order.root_ranks, out)
    if count and out.min() < 0:
        bad = words[int(np.argmin(out))]
        raise NonPrimitiveError(f"{format_word(bad.tolist())!r} is a proper power")
    return out
