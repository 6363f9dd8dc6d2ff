"""Random edge orientations, the integer cocycle they carry, and the skew
product that cocycle drives on (orientations) x R.

An orientation assigns +-1 to every edge of the Cayley tree: ``+1`` means
the edge agrees with its reference direction (away from the base vertex),
``-1`` that it points toward the base vertex.  Edges are independent and
point toward the base vertex with probability ``p``; for ``p != 1/2`` the
path sums drift and the translation flow on the second coordinate is a
transient random walk.

Orientations are lazy.  A 64-bit seed addresses a full sample of the
product measure: the value on an edge is a keyed PRF of (seed, edge), so
only queried edges are ever materialized.  Pushforwards ``g . omega`` keep
a reference to the base orientation and pull values back through the edge
action, memoizing what they have answered.

The cocycle of a group element is the sum of signed orientation values
along the geodesic from the base vertex to its translate.  Along such an
outward geodesic every travel flag is ``+1``, which is why the cocycle of
a length-L word has the exact binomial law provided by
:func:`path_sum_law`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

import numpy as np

from .parallel import map_blocks
from .rng import prf_uniform, prf_uniform_array, sample_seed, sample_seeds_array
from .words import CanonicalEdge, GeodesicPath, Word, act_on_edge, geodesic

__all__ = [
    "OrientationMeasure",
    "Orientation",
    "SkewPoint",
    "PathSumLaw",
    "orientation_value",
    "path_cocycle",
    "group_cocycle",
    "pushforward",
    "skew_step",
    "path_sum_law",
    "exact_window_coefficient",
    "exact_gaussian_bound",
    "cocycle_samples",
]


@dataclass(frozen=True)
class OrientationMeasure:
    """Bernoulli product law on orientations.

    Each edge independently points toward the base vertex with probability
    ``p``.  Values of ``p`` in the open interval (0, 1) are accepted;
    ``p = 1/2`` gives the driftless (non-transient) regime, kept around for
    contrast experiments, and is flagged by :attr:`transient`.
    """

    p: float
    rank: int = 2

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie strictly inside (0, 1), got {self.p}")
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")

    @property
    def basepoint(self) -> Word:
        return Word.identity(self.rank)

    @property
    def transient(self) -> bool:
        return self.p != 0.5


class Orientation:
    """One sampled orientation, addressed lazily by its seed.

    ``overrides`` pins chosen edges regardless of the seed.  Instances are
    value objects: nothing observable ever changes after construction (the
    internal memo only caches answers).
    """

    __slots__ = ("seed", "measure", "overrides", "_base", "_inv", "_memo")

    def __init__(
        self,
        seed: int,
        measure: OrientationMeasure,
        overrides: Optional[Mapping[CanonicalEdge, int]] = None,
    ):
        self.seed = int(seed)
        self.measure = measure
        self.overrides = dict(overrides) if overrides else {}
        for edge, v in self.overrides.items():
            if v not in (-1, 1):
                raise ValueError(f"override for {edge} must be +-1, got {v!r}")
        self._base: Optional[Orientation] = None
        self._inv: Optional[Word] = None
        self._memo: dict[CanonicalEdge, int] = {}

    @classmethod
    def _pushed(cls, base: "Orientation", g: Word) -> "Orientation":
        obj = cls.__new__(cls)
        obj.seed = base.seed
        obj.measure = base.measure
        obj.overrides = {}
        obj._base = base
        obj._inv = ~g
        obj._memo = {}
        return obj

    def value(self, edge: CanonicalEdge) -> int:
        """The +-1 value of this orientation on a canonical edge."""
        if edge.parent.rank != self.measure.rank:
            raise ValueError(
                f"rank mismatch: edge has rank {edge.parent.rank}, "
                f"orientation has rank {self.measure.rank}"
            )
        v = self.overrides.get(edge)
        if v is not None:
            return v
        v = self._memo.get(edge)
        if v is None:
            if self._base is not None:
                preimage, flip = act_on_edge(self._inv, edge)
                v = flip * self._base.value(preimage)
            else:
                u = prf_uniform(self.seed, edge.fingerprint)
                v = -1 if u < self.measure.p else 1
            self._memo[edge] = v
        return v


def orientation_value(omega: Orientation, edge: CanonicalEdge) -> int:
    return omega.value(edge)


def pushforward(g: Word, omega: Orientation) -> Orientation:
    """The orientation ``g . omega``.

    Its value on an edge is ``flip * omega(preimage)`` where
    ``(preimage, flip) = act_on_edge(g^-1, edge)``: the preimage supplies
    the sampled direction and the flip accounts for the edge's reference
    direction reversing under ``g``.
    """
    if g.rank != omega.measure.rank:
        raise ValueError(f"rank mismatch: {g.rank} vs {omega.measure.rank}")
    if not g.letters:
        return omega
    return Orientation._pushed(omega, g)


def path_cocycle(omega: Orientation, x: Word, y: Word) -> int:
    """Sum of travel-signed orientation values along the geodesic x -> y.

    A term is ``+1`` when the path traverses the edge in the direction the
    orientation points, ``-1`` otherwise; antisymmetric in (x, y) and
    additive along concatenations, both exactly.
    """
    path: GeodesicPath = geodesic(x, y)
    return sum(travel * omega.value(edge) for edge, travel in path.steps)


def group_cocycle(omega: Orientation, g: Word) -> int:
    """``path_cocycle`` from the base vertex to ``g``."""
    return path_cocycle(omega, omega.measure.basepoint, g)


@dataclass(frozen=True)
class SkewPoint:
    """A point of the skew product: an orientation and a real coordinate."""

    orientation: Orientation
    t: float


def skew_step(g: Word, point: SkewPoint) -> SkewPoint:
    """One step of the skew action.

    The orientation moves by pushforward and the real coordinate shifts by
    the cocycle of ``g^-1`` evaluated at the *incoming* orientation; this is
    the choice that makes the action law ``beta_gh = beta_g o beta_h`` hold
    exactly, via the cocycle chain rule.
    """
    shift = group_cocycle(point.orientation, ~g)
    return SkewPoint(pushforward(g, point.orientation), point.t + shift)


@dataclass(frozen=True)
class PathSumLaw:
    """Exact law of the cocycle of a length-L word.

    Support is ``{L - 2j : 0 <= j <= L}`` and the value ``L - 2j`` has
    probability ``C(L, j) p^j (1-p)^(L-j)``, with ``j`` counting the edges
    of the outward geodesic that point toward the base vertex.  The mean is
    ``L (1 - 2p)``.
    """

    length: int
    p: float
    pmf: dict

    def support(self) -> list[int]:
        return sorted(self.pmf)

    def probability(self, s: int) -> float:
        return self.pmf.get(s, 0.0)

    def expectation(self, fn: Callable[[int], float]) -> float:
        return math.fsum(self.pmf[s] * fn(s) for s in sorted(self.pmf))

    def mean(self) -> float:
        return self.expectation(float)


def path_sum_law(length: int, p: float) -> PathSumLaw:
    """Binomial path-sum law for an outward geodesic of the given length."""
    if length < 0:
        raise ValueError(f"length must be >= 0, got {length}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p}")
    pmf = {
        length - 2 * j: math.comb(length, j) * p**j * (1.0 - p) ** (length - j)
        for j in range(length + 1)
    }
    total = math.fsum(pmf.values())
    if abs(total - 1.0) > 1e-12:
        raise ArithmeticError(f"path-sum pmf sums to {total!r}")
    return PathSumLaw(length, p, pmf)


def exact_window_coefficient(g: Word, n: int, p: float) -> float:
    """Matrix coefficient of the normalized window [-n, n] at ``g``.

    Equals ``E[max(2n - |S|, 0)] / (2n)`` for the path sum ``S`` of ``g``;
    in particular it is bounded below by ``1 - |g| / (2n)``.
    """
    if n < 1:
        raise ValueError(f"window size must be >= 1, got {n}")
    law = path_sum_law(len(g), p)
    width = 2.0 * n
    return law.expectation(lambda s: max(width - abs(s), 0.0) / width)


def exact_gaussian_bound(g: Word, p: float) -> float:
    """``E[exp(-S^2 / 2)]`` for the path sum ``S`` of ``g``.

    This is the normalized Gaussian-profile coefficient at ``g``; it decays
    to 0 along any sequence of words with growing length when p != 1/2.
    """
    law = path_sum_law(len(g), p)
    return law.expectation(lambda s: math.exp(-0.5 * s * s))


def cocycle_samples(
    g: Word, p: float, seed: int, n: int, workers: int = 1
) -> np.ndarray:
    """``n`` i.i.d. draws of the cocycle value of ``g``, as an int64 array.

    Draw ``i`` evaluates the orientation with seed ``sample_seed(seed, i)``
    on the geodesic edges of ``g``, vectorized; the output is bit-identical
    to a scalar :func:`group_cocycle` loop over those seeds, and does not
    depend on the worker partition (only float reductions downstream do).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p}")
    if n < 0:
        raise ValueError(f"sample count must be >= 0, got {n}")
    path = geodesic(Word.identity(g.rank), g)
    out = np.zeros(n, dtype=np.int64)
    if not path.steps or n == 0:
        return out
    fps = np.array([edge.fingerprint for edge, _ in path.steps], dtype=np.uint64)
    travels = np.array([travel for _, travel in path.steps], dtype=np.int64)

    def fill(lo: int, hi: int) -> None:
        seeds = sample_seeds_array(seed, lo, hi)
        u = prf_uniform_array(seeds[:, None], fps[None, :])
        signs = np.where(u < p, -1, 1).astype(np.int64)
        out[lo:hi] = signs @ travels

    map_blocks(fill, n, workers)
    return out
