"""Coefficient experiments over the two skew-product systems.

This is the measurement layer: it evaluates diagonal and cross matrix
coefficients ``<pi(g) xi, eta>`` of the Koopman representation for either
system (the Bernoulli orientation system at parameter ``p``, or the
Gaussian system), sweeps them over shells of the group, and emits the
results as deterministic CSV.

Exact routes come first: the orientation system averages the profile
correlation against the binomial path-sum law, and the Gaussian system
uses the erf/quadrature closed forms.  Monte Carlo is the independent
cross-check, driven by the actual skew machinery (orientation seeds
through the edge PRF, Gaussian draws through the Cholesky factor), with
seed ranges partitioned across workers so results are bit-identical for a
fixed (seed, worker count).

CSV schemas (all reals printed with 17 significant digits):

* decay curves:  ``system,profile,radius,word,method,value,stderr,samples,seed``
* window sweeps: ``system,ball_radius,n,sup_defect,bound``
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .gaussian import gram_matrix
from .numerics import interval_overlap, shifted_overlap_array, shifted_overlap_mean
from .orientation import cocycle_samples, path_sum_law
from .parallel import map_blocks
from .profiles import ProfileVector
from .words import Word, shell, shell_size, sample_word

__all__ = [
    "UnsupportedProfileError",
    "SystemSpec",
    "orientation_system",
    "gaussian_system",
    "MCBudget",
    "CoefficientEstimate",
    "coefficient",
    "symmetric_difference",
    "symmetric_difference_mc",
    "DecayPoint",
    "ShellStats",
    "DecayCurve",
    "decay_sweep",
    "SweepRow",
    "SweepTable",
    "almost_invariant_sweep",
    "emit_csv",
]


class UnsupportedProfileError(ValueError):
    """Raised for (system, profile) pairs without an evaluation rule."""


@dataclass(frozen=True)
class SystemSpec:
    """Which skew product to measure: ``orientation`` (needs p) or ``gaussian``."""

    kind: str
    p: Optional[float] = None
    rank: int = 2

    def __post_init__(self):
        if self.kind not in ("orientation", "gaussian"):
            raise ValueError(f"unknown system kind {self.kind!r}")
        if self.kind == "orientation":
            if self.p is None or not 0.0 < self.p < 1.0:
                raise ValueError(f"orientation system needs p in (0, 1), got {self.p!r}")
        elif self.p is not None:
            raise ValueError("gaussian system takes no p")
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")

    def label(self) -> str:
        if self.kind == "orientation":
            return f"orientation(p={self.p!r})"
        return "gaussian"


def orientation_system(p: float = 0.7, rank: int = 2) -> SystemSpec:
    return SystemSpec("orientation", p=p, rank=rank)


def gaussian_system(rank: int = 2) -> SystemSpec:
    return SystemSpec("gaussian", rank=rank)


@dataclass(frozen=True)
class MCBudget:
    """Monte Carlo budget: sample count, base seed, worker partition."""

    samples: int = 100_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class CoefficientEstimate:
    """A coefficient value with its provenance.

    ``method`` is one of ``exact``, ``quadrature`` or ``monte-carlo``;
    the standard error is 0 for the two deterministic methods.
    """

    value: float
    stderr: float
    method: str
    samples: int
    seed: int

    def __post_init__(self):
        if self.method not in ("exact", "quadrature", "monte-carlo"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.stderr < 0.0:
            raise ValueError(f"stderr must be >= 0, got {self.stderr}")


def _check_support(system: SystemSpec, *profiles: ProfileVector) -> None:
    if system.kind == "orientation":
        for prof in profiles:
            if prof.kind == "cauchy":
                raise UnsupportedProfileError(
                    "the orientation system supports window, indicator and gaussian "
                    "profiles only"
                )


def _blocked_mean_stderr(values: np.ndarray, workers: int) -> tuple[float, float]:
    """Mean and standard error with a fixed-order blocked reduction."""
    n = len(values)
    parts = map_blocks(
        lambda lo, hi: (
            float(np.sum(values[lo:hi])),
            float(np.sum(np.square(values[lo:hi]))),
        ),
        n,
        workers,
    )
    total = math.fsum(s for s, _ in parts)
    total_sq = math.fsum(q for _, q in parts)
    mean = total / n
    if n > 1:
        var = max(0.0, (total_sq - n * mean * mean) / (n - 1))
    else:
        var = 0.0
    return mean, math.sqrt(var / n)


def _mc_shifts(system: SystemSpec, g: Word, budget: MCBudget) -> np.ndarray:
    """Cocycle shift samples drawn through the actual skew machinery."""
    if system.kind == "orientation":
        draws = cocycle_samples(g, system.p, budget.seed, budget.samples, budget.workers)
        return draws.astype(np.float64)
    return gram_matrix([g]).sample_matrix(budget.samples, budget.seed)[:, 0]


def coefficient(
    system: SystemSpec,
    g: Word,
    xi: ProfileVector,
    eta: ProfileVector,
    budget: Optional[MCBudget] = None,
    method: str = "auto",
) -> CoefficientEstimate:
    """Matrix coefficient ``<pi(g) xi, eta>`` of the chosen system.

    ``method="auto"`` uses the exact route (path-sum law for the
    orientation system, erf/quadrature closed forms for the Gaussian one);
    ``method="mc"`` forces the Monte Carlo route with the given budget.
    The value is always bounded by ``xi.norm() * eta.norm()`` because the
    correlation kernel is pointwise bounded by it.
    """
    if g.rank != system.rank:
        raise ValueError(f"rank mismatch: word has {g.rank}, system has {system.rank}")
    if method not in ("auto", "exact", "mc"):
        raise ValueError(f"unknown method {method!r}")
    _check_support(system, xi, eta)
    seed = budget.seed if budget is not None else 0
    if method in ("auto", "exact"):
        if system.kind == "orientation":
            law = path_sum_law(len(g), system.p)
            value = law.expectation(lambda s: xi.correlation(eta, float(s)))
            return CoefficientEstimate(value, 0.0, "exact", 0, seed)
        value, how = xi.gaussian_mean(eta, math.sqrt(len(g)))
        return CoefficientEstimate(value, 0.0, how, 0, seed)
    budget = budget or MCBudget()
    shifts = _mc_shifts(system, g, budget)
    vals = xi.correlation_array(eta, shifts)
    mean, stderr = _blocked_mean_stderr(vals, budget.workers)
    return CoefficientEstimate(mean, stderr, "monte-carlo", budget.samples, budget.seed)


def _set_interval(profile: ProfileVector) -> tuple[float, float]:
    if not profile.is_interval_kind:
        raise ValueError(
            "symmetric difference needs an indicator or window profile as the set"
        )
    return profile.support_interval()


def symmetric_difference(system: SystemSpec, g: Word, a: ProfileVector) -> float:
    """Measure of ``beta_g(A) symmetric-difference A`` for a strip set A.

    ``A`` is the product of the base space with the profile's interval, so
    its measure is the interval length and the defect identity

        nu(beta_g A  delta  A) = 2 (nu(A) - <pi(g) chi_A, chi_A>)

    is evaluated exactly: the overlap term averages the shifted interval
    overlap against the path-sum law (orientation) or the normal law of
    the shift (gaussian).
    """
    if g.rank != system.rank:
        raise ValueError(f"rank mismatch: word has {g.rank}, system has {system.rank}")
    interval = _set_interval(a)
    measure = interval[1] - interval[0]
    if system.kind == "orientation":
        law = path_sum_law(len(g), system.p)
        overlap = law.expectation(
            lambda s: interval_overlap((interval[0] + s, interval[1] + s), interval)
        )
    else:
        overlap = shifted_overlap_mean(math.sqrt(len(g)), interval, interval)
    return 2.0 * (measure - overlap)


def symmetric_difference_mc(
    system: SystemSpec, g: Word, a: ProfileVector, budget: Optional[MCBudget] = None
) -> CoefficientEstimate:
    """Direct Monte Carlo of the symmetric-difference measure.

    Each sampled orientation (or Gaussian draw) contributes the exact
    fiberwise length ``2 (nu(A) - length((I + shift) ∩ I))``; the estimate
    averages those fibers.
    """
    if g.rank != system.rank:
        raise ValueError(f"rank mismatch: word has {g.rank}, system has {system.rank}")
    interval = _set_interval(a)
    measure = interval[1] - interval[0]
    budget = budget or MCBudget()
    shifts = _mc_shifts(system, g, budget)
    vals = 2.0 * (measure - shifted_overlap_array(shifts, interval, interval))
    mean, stderr = _blocked_mean_stderr(vals, budget.workers)
    return CoefficientEstimate(mean, stderr, "monte-carlo", budget.samples, budget.seed)


@dataclass(frozen=True)
class DecayPoint:
    """One evaluated word in a decay sweep."""

    radius: int
    word: Word
    estimate: CoefficientEstimate


@dataclass(frozen=True)
class ShellStats:
    """Aggregate of the coefficient over the evaluated words of one shell."""

    radius: int
    count: int
    minimum: float
    mean: float
    maximum: float


@dataclass(frozen=True)
class DecayCurve:
    """A decay sweep: per-word estimates plus per-shell aggregates."""

    system: SystemSpec
    profile: ProfileVector
    points: tuple[DecayPoint, ...]

    def rows(self) -> list[ShellStats]:
        by_radius: dict[int, list[float]] = {}
        for pt in self.points:
            by_radius.setdefault(pt.radius, []).append(pt.estimate.value)
        out = []
        for radius in sorted(by_radius):
            vals = by_radius[radius]
            out.append(
                ShellStats(
                    radius,
                    len(vals),
                    min(vals),
                    math.fsum(vals) / len(vals),
                    max(vals),
                )
            )
        return out


_ENUMERATION_LIMIT = 100_000


def _shell_words(
    length: int, rank: int, cap: Optional[int], seed: int
) -> list[Word]:
    size = shell_size(length, rank)
    if cap is None:
        if size > _ENUMERATION_LIMIT:
            raise ValueError(
                f"shell of length {length} has {size} words; pass per_shell_cap"
            )
        return shell(length, rank)
    if size <= cap:
        return shell(length, rank)
    rng = random.Random(f"shell:{seed}:{length}")
    chosen: list[Word] = []
    seen = set()
    while len(chosen) < cap:
        w = sample_word(length, rank, rng)
        if w not in seen:
            seen.add(w)
            chosen.append(w)
    return chosen


def decay_sweep(
    system: SystemSpec,
    profile: ProfileVector,
    max_radius: int,
    per_shell_cap: Optional[int] = None,
    budget: Optional[MCBudget] = None,
    method: str = "auto",
) -> DecayCurve:
    """Evaluate the diagonal coefficient over shells ``L = 1..max_radius``.

    Shells are enumerated exhaustively when they fit under the cap and
    sampled uniformly (seeded, without replacement) otherwise.  The
    min/mean/max aggregates should collapse to a single value per shell:
    any spread would reveal a dependence on word shape beyond length.
    """
    if max_radius < 1:
        raise ValueError(f"max_radius must be >= 1, got {max_radius}")
    _check_support(system, profile)
    seed = budget.seed if budget is not None else 0
    points = []
    for length in range(1, max_radius + 1):
        for w in _shell_words(length, system.rank, per_shell_cap, seed):
            est = coefficient(system, w, profile, profile, budget=budget, method=method)
            points.append(DecayPoint(length, w, est))
    return DecayCurve(system, profile, tuple(points))


@dataclass(frozen=True)
class SweepRow:
    """Sup of the window defect over a ball, with its certified bound."""

    n: int
    sup_defect: float
    bound: float


@dataclass(frozen=True)
class SweepTable:
    system: SystemSpec
    ball_radius: int
    rows: tuple[SweepRow, ...]


def almost_invariant_sweep(
    system: SystemSpec, ball_radius: int, window_sizes: Iterable[int]
) -> SweepTable:
    """Sup over the ball of the window defect ``1 - <pi(g) xi_n, xi_n>``.

    Window coefficients depend on a word only through its length in both
    systems, so the sup over ``ball(R)`` is the max over lengths
    ``0..R``, evaluated on one representative per length.  The bound
    column is the certified a priori rate: ``R / (2n)`` for the
    orientation system and ``sqrt(R) sqrt(2/pi) / (2n)`` for the Gaussian
    one; the sup stays below it up to roundoff (for the Gaussian system
    the true gap shrinks like a normal tail, so at large ``n / sqrt(R)``
    the two columns agree to machine precision).
    """
    if ball_radius < 0:
        raise ValueError(f"ball_radius must be >= 0, got {ball_radius}")
    sizes = [int(n) for n in window_sizes]
    if not sizes:
        raise ValueError("at least one window size is required")
    rows = []
    for n in sizes:
        profile = ProfileVector.window(n)
        defects = [0.0]
        for length in range(1, ball_radius + 1):
            rep = Word((1,) * length, system.rank)
            est = coefficient(system, rep, profile, profile)
            defects.append(1.0 - est.value)
        if system.kind == "orientation":
            bound = ball_radius / (2.0 * n)
        else:
            bound = math.sqrt(ball_radius) * math.sqrt(2.0 / math.pi) / (2.0 * n)
        rows.append(SweepRow(n, max(defects), bound))
    return SweepTable(system, ball_radius, tuple(rows))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def emit_csv(obj: Union[DecayCurve, SweepTable], dest) -> None:
    """Write a curve or sweep table as CSV (schemas in the module docstring).

    ``dest`` may be a path or an open text file.  Output is byte-stable:
    fixed header, fixed row order, reals at 17 significant digits.
    """
    if hasattr(dest, "write"):
        _write_csv(obj, dest)
        return
    with open(Path(dest), "w", newline="") as fh:
        _write_csv(obj, fh)


def _write_csv(obj, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    if isinstance(obj, DecayCurve):
        writer.writerow(
            ["system", "profile", "radius", "word", "method", "value", "stderr", "samples", "seed"]
        )
        for pt in obj.points:
            est = pt.estimate
            writer.writerow(
                [
                    obj.system.label(),
                    obj.profile.label(),
                    pt.radius,
                    str(pt.word),
                    est.method,
                    _fmt(est.value),
                    _fmt(est.stderr),
                    est.samples,
                    est.seed,
                ]
            )
    elif isinstance(obj, SweepTable):
        writer.writerow(["system", "ball_radius", "n", "sup_defect", "bound"])
        for row in obj.rows:
            writer.writerow(
                [obj.system.label(), obj.ball_radius, row.n, _fmt(row.sup_defect), _fmt(row.bound)]
            )
    else:
        raise TypeError(f"cannot emit CSV for {type(obj).__name__}")
