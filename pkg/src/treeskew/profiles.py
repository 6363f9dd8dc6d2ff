"""Profile vectors for the translation coordinate of the skew products.

A profile is a square-integrable function of the real coordinate; matrix
coefficients of both skew systems reduce to averaging the cross-correlation
``K(s) = integral h1(t + s) h2(t) dt`` of two profiles against the law of
the cocycle shift.  Four families are supported:

* ``window(n)``: the indicator of [-n, n] scaled to unit norm,
* ``indicator(a, b)``: the raw indicator of an interval,
* ``gaussian``: ``exp(-t^2)``,
* ``cauchy``: ``1 / (1 + t^2)``.

The gaussian and cauchy norms are finite constants computed once by
quadrature; the cauchy correlation kernel has the candidate closed form
``2 pi / (4 + s^2)``, which is validated against this module's own
quadrature the first time it is trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .numerics import (
    adaptive_simpson,
    check_interval,
    gaussian_expectation,
    interval_overlap,
    shifted_overlap_array,
    shifted_overlap_mean,
)

__all__ = [
    "ProfileVector",
    "cauchy_kernel",
    "cauchy_kernel_by_quadrature",
    "cauchy_norm_sq",
    "gaussian_norm_sq",
]

_HALF_PI = 0.5 * math.pi
_SQRT_HALF_PI = math.sqrt(0.5 * math.pi)
_KINDS = ("window", "indicator", "gaussian", "cauchy")
_NORMALIZATIONS = ("unit", "raw")


def cauchy_kernel_by_quadrature(x: float, tol: float = 1e-10) -> float:
    """``integral h(t) h(t + x) dt`` for ``h(t) = 1/(1 + t^2)``, by quadrature.

    Substituting ``t = tan(u)`` turns the integral into the bounded smooth
    ``integral_{-pi/2}^{pi/2} du / (1 + (tan u + x)^2)``.
    """

    def integrand(u: float) -> float:
        if abs(abs(u) - _HALF_PI) < 1e-9:
            return 0.0
        w = math.tan(u) + x
        return 1.0 / (1.0 + w * w)

    return adaptive_simpson(integrand, -_HALF_PI, _HALF_PI, tol)


@lru_cache(maxsize=1)
def _kernel_validated() -> bool:
    for x in (0.0, 1.0, 5.0, 20.0):
        closed = 2.0 * math.pi / (4.0 + x * x)
        if abs(closed - cauchy_kernel_by_quadrature(x)) > 1e-8:
            raise ArithmeticError(
                f"cauchy kernel closed form disagrees with quadrature at x={x}"
            )
    return True


def cauchy_kernel(x: float) -> float:
    """Cauchy-profile correlation ``2 pi / (4 + x^2)``, quadrature-checked once."""
    _kernel_validated()
    return 2.0 * math.pi / (4.0 + x * x)


@lru_cache(maxsize=1)
def cauchy_norm_sq() -> float:
    """``integral dt / (1 + t^2)^2`` by quadrature (equals pi/2)."""
    return adaptive_simpson(lambda u: math.cos(u) ** 2, -_HALF_PI, _HALF_PI, 1e-12)


@lru_cache(maxsize=1)
def gaussian_norm_sq() -> float:
    """``integral exp(-2 t^2) dt`` by quadrature (equals sqrt(pi/2))."""
    return adaptive_simpson(lambda t: math.exp(-2.0 * t * t), -10.0, 10.0, 1e-12)


@dataclass(frozen=True)
class ProfileVector:
    """One profile with its normalization convention.

    ``unit`` rescales the profile to L2-norm one; ``raw`` keeps the defining
    function as is.  Windows are unit by construction.
    """

    kind: str
    n: Optional[int] = None
    interval: Optional[tuple[float, float]] = None
    normalization: str = "unit"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.normalization not in _NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}")
        if self.kind == "window":
            if self.n is None or self.n < 1:
                raise ValueError(f"window size must be a positive int, got {self.n!r}")
            if self.normalization != "unit":
                raise ValueError("window profiles are unit-normalized by construction")
        elif self.n is not None:
            raise ValueError(f"{self.kind!r} profile takes no window size")
        if self.kind == "indicator":
            if self.interval is None:
                raise ValueError("indicator profile requires an interval")
            object.__setattr__(self, "interval", check_interval(self.interval))
        elif self.interval is not None:
            raise ValueError(f"{self.kind!r} profile takes no interval")

    @classmethod
    def window(cls, n: int) -> "ProfileVector":
        return cls("window", n=n)

    @classmethod
    def indicator(cls, a: float, b: float, normalization: str = "raw") -> "ProfileVector":
        return cls("indicator", interval=(a, b), normalization=normalization)

    @classmethod
    def gaussian(cls, normalization: str = "unit") -> "ProfileVector":
        return cls("gaussian", normalization=normalization)

    @classmethod
    def cauchy(cls, normalization: str = "unit") -> "ProfileVector":
        return cls("cauchy", normalization=normalization)

    def label(self) -> str:
        if self.kind == "window":
            return f"window({self.n})"
        if self.kind == "indicator":
            a, b = self.interval
            return f"indicator({a!r}:{b!r})[{self.normalization}]"
        return f"{self.kind}[{self.normalization}]"

    @property
    def is_interval_kind(self) -> bool:
        return self.kind in ("window", "indicator")

    def support_interval(self) -> tuple[float, float]:
        """The underlying interval of a window or indicator profile."""
        if self.kind == "window":
            return (-float(self.n), float(self.n))
        if self.kind == "indicator":
            return self.interval
        raise ValueError(f"{self.kind!r} profile has no interval support")

    def raw_norm_sq(self) -> float:
        if self.kind == "window":
            return 2.0 * self.n
        if self.kind == "indicator":
            a, b = self.interval
            return b - a
        if self.kind == "gaussian":
            return gaussian_norm_sq()
        return cauchy_norm_sq()

    def norm_sq(self) -> float:
        return 1.0 if self.normalization == "unit" else self.raw_norm_sq()

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def _height(self) -> float:
        """Scale factor applied to the defining function of the profile."""
        if self.kind == "window":
            return 1.0 / math.sqrt(2.0 * self.n)
        if self.normalization == "raw":
            return 1.0
        return 1.0 / math.sqrt(self.raw_norm_sq())

    def _pair_kind(self, other: "ProfileVector") -> str:
        if self.is_interval_kind and other.is_interval_kind:
            return "interval"
        if self.kind == other.kind:
            return self.kind
        raise ValueError(
            f"no correlation rule for profile pair ({self.kind!r}, {other.kind!r})"
        )

    def _pair_scale(self, other: "ProfileVector") -> float:
        # Two windows combine to 1/(2 sqrt(n1 n2)); taking the single square
        # root keeps small rational values (like the half-overlap 1/2) exact.
        if self.kind == "window" and other.kind == "window":
            return 1.0 / (2.0 * math.sqrt(self.n * other.n))
        return self._height() * other._height()

    def correlation(self, other: "ProfileVector", s: float) -> float:
        """Cross-correlation ``K(s) = integral h_self(t + s) h_other(t) dt``."""
        pair = self._pair_kind(other)
        scale = self._pair_scale(other)
        if pair == "interval":
            # h_self(t + s) lives on the support shifted left by s
            i, j = self.support_interval(), other.support_interval()
            return scale * interval_overlap((i[0] - s, i[1] - s), j)
        if pair == "gaussian":
            return scale * _SQRT_HALF_PI * math.exp(-0.5 * s * s)
        return scale * cauchy_kernel(s)

    def correlation_array(self, other: "ProfileVector", s: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`correlation` over an array of shifts."""
        pair = self._pair_kind(other)
        scale = self._pair_scale(other)
        s = np.asarray(s, dtype=np.float64)
        if pair == "interval":
            return scale * shifted_overlap_array(
                -s, self.support_interval(), other.support_interval()
            )
        if pair == "gaussian":
            return scale * _SQRT_HALF_PI * np.exp(-0.5 * s * s)
        cauchy_kernel(0.0)  # force the one-time closed-form validation
        return scale * 2.0 * math.pi / (4.0 + s * s)

    def gaussian_mean(self, other: "ProfileVector", sigma: float) -> tuple[float, str]:
        """``E[K(X)]`` for ``X ~ N(0, sigma^2)`` with the method used.

        Interval and gaussian pairs have erf-exact closed forms; the cauchy
        pair is averaged by adaptive quadrature.
        """
        if sigma < 0.0:
            raise ValueError(f"sigma must be >= 0, got {sigma}")
        pair = self._pair_kind(other)
        scale = self._pair_scale(other)
        if pair == "interval":
            # X is symmetric, so the left-shift in correlation() averages
            # the same as the right-shift computed by shifted_overlap_mean
            value = scale * shifted_overlap_mean(
                sigma, self.support_interval(), other.support_interval()
            )
            return value, "exact"
        if pair == "gaussian":
            value = scale * _SQRT_HALF_PI / math.sqrt(1.0 + sigma * sigma)
            return value, "exact"
        value = gaussian_expectation(lambda x: scale * cauchy_kernel(x), sigma)
        return value, "quadrature"
