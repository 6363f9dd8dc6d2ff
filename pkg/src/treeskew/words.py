"""Reduced words in a free group and the geometry of its Cayley tree.

Vertices of the Cayley tree of the free group on ``k`` generators are the
freely reduced words; the base vertex is the empty word.  Every edge joins
a word to a one-letter extension of it, and the canonical form of an edge
names the shorter endpoint (``parent``) and the generator step to the
longer one.  The reference direction of an edge always points away from
the base vertex.

Everything in this module is exact integer and tuple arithmetic; there is
no floating point anywhere in the geometry.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from .rng import GOLDEN, MASK64, fingerprint_letters, mix64

__all__ = [
    "Word",
    "CanonicalEdge",
    "GeodesicPath",
    "parse_word",
    "common_prefix_length",
    "distance",
    "geodesic",
    "median",
    "act_on_edge",
    "letter_order",
    "iter_words",
    "ball",
    "ball_size",
    "shell",
    "shell_size",
    "ball_edges",
    "sample_word",
]


def _reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for s in letters:
        if out and out[-1] == -s:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word, i.e. a vertex of the Cayley tree.

    Letters are signed generator indices: ``2`` means the second generator,
    ``-2`` its inverse.  Instances are immutable and hashable; ``*`` is the
    group operation and ``~`` the group inverse.
    """

    letters: tuple[int, ...]
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")
        prev = 0
        for s in self.letters:
            if not isinstance(s, int) or s == 0 or abs(s) > self.rank:
                raise ValueError(f"invalid letter {s!r} for rank {self.rank}")
            if s == -prev:
                raise ValueError(f"word {self.letters!r} is not freely reduced")
            prev = s

    @classmethod
    def from_letters(cls, letters: Iterable[int], rank: int) -> "Word":
        return cls(_reduce(letters), rank)

    @classmethod
    def identity(cls, rank: int) -> "Word":
        return cls((), rank)

    @classmethod
    def generator(cls, index: int, rank: int) -> "Word":
        return cls((index,), rank)

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        _check_ranks(self, other)
        out = list(self.letters)
        for s in other.letters:
            if out and out[-1] == -s:
                out.pop()
            else:
                out.append(s)
        return Word(tuple(out), self.rank)

    def __invert__(self) -> "Word":
        return Word(tuple(-s for s in reversed(self.letters)), self.rank)

    def prefix(self, length: int) -> "Word":
        return Word(self.letters[:length], self.rank)

    @cached_property
    def fingerprint(self) -> int:
        return fingerprint_letters(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        if self.rank <= 26:
            return "".join(
                chr(ord("a") + s - 1) if s > 0 else chr(ord("A") - s - 1)
                for s in self.letters
            )
        return " ".join(f"a{s}" if s > 0 else f"a{-s}^-1" for s in self.letters)


def _check_ranks(x: Word, y: Word) -> None:
    if x.rank != y.rank:
        raise ValueError(f"rank mismatch: {x.rank} vs {y.rank}")


def parse_word(text: str, rank: int) -> Word:
    """Parse ``text`` into a reduced :class:`Word`.

    Two syntaxes are accepted and may be mixed: compact letters
    (``"abAB"``, where ``a..z`` are generators 1..k and ``A..Z`` their
    inverses) and indexed tokens (``"a1 a2^-1"``).  An exponent introduced
    by ``^`` applies to the preceding letter; whitespace is ignored.  The
    bare string ``"1"`` denotes the identity.
    """
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    if text.strip() == "1":
        return Word.identity(rank)
    letters: list[int] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if not c.isalpha():
            raise ValueError(f"unknown letter {c!r} at position {i}")
        i += 1
        j = i
        while j < n and text[j].isdigit():
            j += 1
        if j > i:
            index = int(text[i:j])
            i = j
        else:
            index = ord(c.lower()) - ord("a") + 1
        if not 1 <= index <= rank:
            raise ValueError(f"generator {c!r} (index {index}) beyond rank {rank}")
        sign = 1 if c.islower() else -1
        exponent = 1
        if i < n and text[i] == "^":
            i += 1
            j = i
            if j < n and text[j] in "+-":
                j += 1
            while j < n and text[j].isdigit():
                j += 1
            body = text[i:j]
            digits = body[1:] if body[:1] in "+-" else body
            if not digits.isdigit():
                raise ValueError(f"malformed exponent token at position {i}")
            exponent = int(body)
            i = j
        letter = sign * index
        if exponent < 0:
            letter, exponent = -letter, -exponent
        letters.extend([letter] * exponent)
    return Word.from_letters(letters, rank)


def common_prefix_length(x: Word, y: Word) -> int:
    _check_ranks(x, y)
    m = min(len(x), len(y))
    i = 0
    while i < m and x.letters[i] == y.letters[i]:
        i += 1
    return i


def distance(x: Word, y: Word) -> int:
    """Word-metric distance ``|x^-1 y|``, the number of tree edges between x and y."""
    return len(x) + len(y) - 2 * common_prefix_length(x, y)


@dataclass(frozen=True)
class CanonicalEdge:
    """A tree edge in canonical form.

    ``parent`` is the endpoint closer to the base vertex and
    ``parent * step`` the farther one, so ``len(child) == len(parent) + 1``
    always holds.  The reference direction is parent -> child.
    """

    parent: Word
    step: int

    def __post_init__(self):
        r = self.parent.rank
        if not isinstance(self.step, int) or self.step == 0 or abs(self.step) > r:
            raise ValueError(f"invalid step {self.step!r} for rank {r}")
        if self.parent.letters and self.parent.letters[-1] == -self.step:
            raise ValueError("edge is not canonical: child would be shorter than parent")

    @cached_property
    def child(self) -> Word:
        return Word(self.parent.letters + (self.step,), self.parent.rank)

    @cached_property
    def fingerprint(self) -> int:
        return mix64(self.parent.fingerprint ^ ((self.step & MASK64) * GOLDEN & MASK64))

    def __str__(self) -> str:
        return f"({self.parent}|{Word((self.step,), self.parent.rank)})"


@dataclass(frozen=True)
class GeodesicPath:
    """The unique simple edge path between two vertices.

    Each step pairs a canonical edge with a travel flag: ``+1`` when the
    path follows the edge's reference direction (away from the base
    vertex), ``-1`` when it runs against it.
    """

    start: Word
    end: Word
    steps: tuple[tuple[CanonicalEdge, int], ...]

    def __len__(self) -> int:
        return len(self.steps)

    def vertices(self) -> list[Word]:
        out = [self.start]
        for edge, travel in self.steps:
            out.append(edge.child if travel > 0 else edge.parent)
        return out


def geodesic(x: Word, y: Word) -> GeodesicPath:
    """Geodesic from ``x`` to ``y``: down to the common prefix, then up."""
    m = common_prefix_length(x, y)
    steps: list[tuple[CanonicalEdge, int]] = []
    for i in range(len(x), m, -1):
        steps.append((CanonicalEdge(x.prefix(i - 1), x.letters[i - 1]), -1))
    for i in range(m, len(y)):
        steps.append((CanonicalEdge(y.prefix(i), y.letters[i]), +1))
    return GeodesicPath(x, y, tuple(steps))


def median(x: Word, y: Word, z: Word) -> Word:
    """The unique vertex lying on all three pairwise geodesics."""
    _check_ranks(x, z)
    t = (distance(x, y) + distance(x, z) - distance(y, z)) // 2
    m = common_prefix_length(x, y)
    if t <= len(x) - m:
        return x.prefix(len(x) - t)
    return y.prefix(m + t - (len(x) - m))


def act_on_edge(g: Word, edge: CanonicalEdge) -> tuple[CanonicalEdge, int]:
    """Image of a canonical edge under left translation by ``g``.

    Returns ``(image, flip)``.  ``flip`` is ``-1`` exactly when the image of
    the reference direction runs against the image edge's own reference,
    i.e. when ``len(g * parent) > len(g * child)``.
    """
    _check_ranks(g, edge.parent)
    u = g * edge.parent
    v = g * edge.child
    if len(v) == len(u) + 1:
        return CanonicalEdge(u, v.letters[-1]), +1
    return CanonicalEdge(v, u.letters[-1]), -1


def letter_order(rank: int) -> list[int]:
    """Deterministic letter ordering used by all enumerations."""
    return list(range(1, rank + 1)) + list(range(-1, -rank - 1, -1))


def iter_words(rank: int) -> Iterator[Word]:
    """Yield every reduced word in breadth-first order (infinite)."""
    order = letter_order(rank)
    current = [Word.identity(rank)]
    while True:
        yield from current
        nxt = []
        for w in current:
            last = w.letters[-1] if w.letters else 0
            for s in order:
                if s != -last:
                    nxt.append(Word(w.letters + (s,), rank))
        current = nxt


def ball(radius: int, rank: int) -> list[Word]:
    """All words of length <= radius, in breadth-first order."""
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    out = []
    for w in iter_words(rank):
        if len(w) > radius:
            break
        out.append(w)
    return out


def ball_size(radius: int, rank: int) -> int:
    """`1 + 2k((2k-1)^r - 1)/(2k-2)` vertices for rank k > 1, 2r+1 for rank 1."""
    k = rank
    if k == 1:
        return 2 * radius + 1
    return 1 + 2 * k * ((2 * k - 1) ** radius - 1) // (2 * k - 2)


def shell(length: int, rank: int) -> list[Word]:
    """All words of exactly the given length, in enumeration order."""
    if length < 0:
        raise ValueError(f"length must be >= 0, got {length}")
    order = letter_order(rank)
    current = [Word.identity(rank)]
    for _ in range(length):
        nxt = []
        for w in current:
            last = w.letters[-1] if w.letters else 0
            for s in order:
                if s != -last:
                    nxt.append(Word(w.letters + (s,), rank))
        current = nxt
    return current


def shell_size(length: int, rank: int) -> int:
    if length == 0:
        return 1
    k = rank
    return 2 * k * (2 * k - 1) ** (length - 1)


def ball_edges(radius: int, rank: int) -> list[CanonicalEdge]:
    """Canonical edges with both endpoints in the ball of the given radius."""
    return [
        CanonicalEdge(w.prefix(len(w) - 1), w.letters[-1])
        for w in ball(radius, rank)
        if w.letters
    ]


def sample_word(length: int, rank: int, rng: random.Random) -> Word:
    """Uniform random reduced word of exactly the given length."""
    if length < 0:
        raise ValueError(f"length must be >= 0, got {length}")
    letters: list[int] = []
    last = 0
    for _ in range(length):
        choices = [s for s in letter_order(rank) if s != -last]
        last = rng.choice(choices)
        letters.append(last)
    return Word(tuple(letters), rank)
