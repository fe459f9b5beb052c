"""Truncated power series over complex coefficients.

A :class:`PowerSeries` stores the first ``order`` Taylor coefficients of an
analytic function about a ``base_point``::

    f(x) = c[0] + c[1]*(x - b) + c[2]*(x - b)**2 + ... + c[order-1]*(x - b)**(order-1)

All coefficients are complex throughout, even for real maps: a negative
multiplier at a fixed point forces complex non-integer powers, so the whole
pipeline works over C.  Values are immutable after construction and all
operations are pure functions of their inputs.

Binary operations truncate to the shortest operand.  Composition with an
inner series whose constant term sits exactly on the outer base point is
exact to the truncation order; otherwise the result is the recentered
truncated polynomial, which is exact only when the outer series is a genuine
polynomial that fits the window (a warning is emitted when it is not).

The module also locates fixed points of a map by Newton iteration and builds
the shifted map ``g(x) = f(x + x*) - x*`` whose embedding matrix is upper
triangular.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import FixedPointNotFound, RestrictiveConditionViolated, Superattracting

# Fixed-point residual tolerance and Newton iteration cap.
TOL_FIX = 1e-12
MAX_NEWTON_ITER = 64

# Resonance guard: reject multipliers within this relative distance of a
# root of unity of order up to ROOT_OF_UNITY_MAX (covers truncation orders
# up to the desk-scale maximum).
TOL_RES = 1e-8
ROOT_OF_UNITY_MAX = 64


class ApproximateCompositionWarning(UserWarning):
    """Composition result is a truncated approximation, not exact."""


def _horner(coeffs: Sequence[complex], z: complex) -> complex:
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _trunc_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two coefficient arrays, truncated to len(a) terms."""
    return np.convolve(a, b)[: len(a)]


def _trunc_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Coefficientwise solution q of den*q = num; den must have den[0] != 0."""
    n = len(num)
    q = np.zeros(n, dtype=complex)
    for k in range(n):
        acc = num[k]
        if k:
            acc = acc - np.dot(q[:k], den[k:0:-1])
        q[k] = acc / den[0]
    return q


@dataclass(frozen=True)
class PowerSeries:
    """Truncated Taylor series; ``coeffs[k]`` multiplies ``(x - base_point)**k``."""

    coeffs: tuple
    base_point: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        object.__setattr__(self, "base_point", complex(self.base_point))
        if not self.coeffs:
            raise ValueError("a power series needs at least one coefficient")

    @classmethod
    def from_coefficients(cls, coeffs, base_point=0j, order=None) -> "PowerSeries":
        """Build a series, zero-padding or truncating to ``order`` terms."""
        cs = [complex(c) for c in coeffs]
        if order is not None:
            if order < 1:
                raise ValueError("order must be at least 1")
            cs = cs[:order] + [0j] * (order - len(cs))
        return cls(tuple(cs), complex(base_point))

    @classmethod
    def identity(cls, order: int, base_point=0j) -> "PowerSeries":
        """The identity map id(x) = x expanded about ``base_point``."""
        return cls.from_coefficients([base_point, 1.0], base_point, order=max(order, 2))

    @classmethod
    def constant(cls, value, order: int, base_point=0j) -> "PowerSeries":
        return cls.from_coefficients([value], base_point, order=max(order, 1))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def coeffs_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=complex)

    def __getitem__(self, k: int) -> complex:
        return self.coeffs[k]

    def __call__(self, x) -> complex:
        return _horner(self.coeffs, complex(x) - self.base_point)

    def degree(self) -> int:
        """Index of the last nonzero coefficient (0 for the zero series)."""
        for k in range(self.order - 1, -1, -1):
            if self.coeffs[k] != 0:
                return k
        return 0

    def truncated(self, order: int) -> "PowerSeries":
        return PowerSeries.from_coefficients(self.coeffs, self.base_point, order=order)

    def derivative(self) -> "PowerSeries":
        n = self.order
        if n == 1:
            return PowerSeries((0j,), self.base_point)
        cs = [k * self.coeffs[k] for k in range(1, n)]
        return PowerSeries(tuple(cs), self.base_point)

    def _binary(self, other, op):
        if isinstance(other, PowerSeries):
            if other.base_point != self.base_point:
                raise ValueError("series arithmetic needs a common base point")
            n = min(self.order, other.order)
            return PowerSeries(
                tuple(op(self.coeffs_array[:n], other.coeffs_array[:n])),
                self.base_point,
            )
        cs = list(self.coeffs)
        cs[0] = op(cs[0], complex(other))
        return PowerSeries(tuple(cs), self.base_point)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __neg__(self):
        return PowerSeries(tuple(-c for c in self.coeffs), self.base_point)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            if other.base_point != self.base_point:
                raise ValueError("series arithmetic needs a common base point")
            n = min(self.order, other.order)
            prod = _trunc_mul(self.coeffs_array[:n], other.coeffs_array[:n])
            return PowerSeries(tuple(prod), self.base_point)
        z = complex(other)
        return PowerSeries(tuple(z * c for c in self.coeffs), self.base_point)

    __rmul__ = __mul__


def compose(outer: PowerSeries, inner: PowerSeries) -> PowerSeries:
    """Coefficients of outer(inner(x)) about inner's base point.

    The result is truncated to the shorter operand.  Exact to the truncation
    order when ``inner``'s constant term equals ``outer``'s base point; with a
    nonzero offset the result is the recentered stored polynomial, which is
    exact only if outer's degree times inner's degree fits the window
    (otherwise an :class:`ApproximateCompositionWarning` is emitted).
    """
    n = min(outer.order, inner.order)
    w = inner.coeffs_array[:n].copy()
    w[0] = w[0] - outer.base_point
    if w[0] != 0:
        d_out = outer.degree()
        d_in = max(
            (k for k in range(1, n) if k < inner.order and inner.coeffs[k] != 0),
            default=0,
        )
        if d_out * max(d_in, 1) > n - 1:
            warnings.warn(
                "inner constant term is off the outer base point and the "
                "window cannot hold the recentered polynomial: result is "
                "approximate",
                ApproximateCompositionWarning,
                stacklevel=2,
            )
    acc = np.zeros(n, dtype=complex)
    for c in outer.coeffs[n - 1 :: -1]:
        acc = _trunc_mul(acc, w)
        acc[0] += c
    return PowerSeries(tuple(acc), inner.base_point)


def revert(s: PowerSeries) -> PowerSeries:
    """Compositional inverse: r with compose(s, r) = id to the truncation order.

    ``s`` must have a zero constant term and a nonzero linear coefficient.
    The result is expanded about 0 (the value space of ``s``) and its constant
    term is ``s.base_point``, so compose(s, revert(s)) and
    compose(revert(s), s) are both identities in the appropriate charts.

    Uses Newton iteration on the coefficient arrays; each sweep doubles the
    number of correct coefficients, so the loop count is fixed by the order.
    """
    if s.coeffs[0] != 0:
        raise ValueError("reversion needs a zero constant term; shift the map first")
    if s.order < 2 or s.coeffs[1] == 0:
        raise ValueError(
            "reversion impossible: zero linear coefficient "
            "(superattracting or degenerate chart)"
        )
    n = s.order
    sc = s.coeffs_array
    ds = np.zeros(n, dtype=complex)
    ds[: n - 1] = [k * sc[k] for k in range(1, n)]
    ident = np.zeros(n, dtype=complex)
    ident[1] = 1.0

    def comp(coeffs, inner):
        acc = np.zeros(n, dtype=complex)
        for c in coeffs[::-1]:
            acc = _trunc_mul(acc, inner)
            acc[0] += c
        return acc

    r = np.zeros(n, dtype=complex)
    r[1] = 1.0 / sc[1]
    sweeps = max(2, math.ceil(math.log2(n)) + 1)
    for _ in range(sweeps):
        num = comp(sc, r) - ident
        den = comp(ds, r)
        r = r - _trunc_div(num, den)
    r[0] = s.base_point
    return PowerSeries(tuple(r), 0j)


def tail_radius(coeffs: Sequence[complex], tol: float = 1e-12) -> float:
    """Radius where the top stored coefficients still contribute at most ``tol``.

    A root-test style estimate of how far from the base point the truncated
    series can be trusted: the largest r with |a_k| r^k <= tol over the
    trailing stored coefficients.  The scan window is the top of the series
    (never below its midpoint), so structural zeros of short polynomials are
    not mistaken for a tail; a window of exact zeros means the stored
    function is a polynomial and the radius is infinite.  Heuristic by
    construction; evaluation sites should additionally be tail-checked.
    """
    n = len(coeffs)
    rs = []
    for k in range(_tail_start(n), n):
        a = abs(coeffs[k])
        if a > 0:
            rs.append((tol / a) ** (1.0 / k))
    return min(rs) if rs else math.inf


def _tail_start(order: int) -> int:
    return max(1, order // 2, order - 5)


def evaluate_with_tail(series: PowerSeries, x) -> tuple:
    """Evaluate and estimate the size of the dropped tail at this argument.

    Returns ``(value, tail)`` where ``tail`` is the magnitude of the largest
    of the trailing stored terms (the truncation zone); a large value flags
    that the truncated series cannot be trusted at ``x``.  Trailing zeros
    mean the stored function is a polynomial there and the tail is exactly
    zero.
    """
    z = complex(x) - series.base_point
    value = _horner(series.coeffs, z)
    tail = 0.0
    az = abs(z)
    for k in range(_tail_start(series.order), series.order):
        a = abs(series.coeffs[k])
        if a > 0:
            tail = max(tail, a * az**k)
    return value, tail


@dataclass(frozen=True)
class FixedPointFrame:
    """A fixed point x*, its multiplier f'(x*), and the shifted map.

    ``shifted_map`` is g(x) = f(x + x*) - x* expanded about 0, so g(0) = 0 and
    g'(0) equals the multiplier.  The constant term is set to exactly zero once
    the Newton residual is below tolerance, so the embedding matrix of g is
    exactly upper triangular.
    """

    x_star: complex
    multiplier: complex
    shifted_map: PowerSeries


def _check_multiplier(lam: complex) -> None:
    if abs(lam) <= TOL_RES:
        raise Superattracting(
            f"multiplier {lam!r} is indistinguishable from zero"
        )
    # Only multipliers near the unit circle can be near a root of unity.
    if abs(abs(lam) - 1.0) < 1e-6:
        power = 1.0 + 0j
        for n in range(1, ROOT_OF_UNITY_MAX + 1):
            power *= lam
            if abs(power - 1.0) <= TOL_RES * n:
                raise RestrictiveConditionViolated(
                    f"multiplier {lam!r} is indistinguishable from a root of "
                    f"unity (order {n})"
                )


def find_fixed_point(
    f: PowerSeries,
    guess,
    tol_fix: float = TOL_FIX,
    max_iter: int = MAX_NEWTON_ITER,
) -> FixedPointFrame:
    """Locate a fixed point of ``f`` by Newton iteration from ``guess``.

    Raises :class:`FixedPointNotFound` (carrying the last iterate) on
    non-convergence and :class:`RestrictiveConditionViolated` when the
    multiplier is numerically zero or a root of unity.
    """
    fprime = f.derivative()
    x = complex(guess)
    residual = f(x) - x
    converged = False
    for _ in range(max_iter):
        if abs(residual) <= tol_fix:
            converged = True
            break
        slope = fprime(x) - 1.0
        if slope == 0:
            raise FixedPointNotFound(
                f"Newton stalled at {x!r}: f'(x) - 1 vanished", last_iterate=x
            )
        x = x - residual / slope
        residual = f(x) - x
    if converged:
        # Polish: a couple of extra steps push the residual to rounding level,
        # which keeps the multiplier (and every chart coefficient) clean.
        for _ in range(2):
            slope = fprime(x) - 1.0
            if slope == 0:
                break
            candidate = x - residual / slope
            cand_residual = f(candidate) - candidate
            if abs(cand_residual) < abs(residual):
                x, residual = candidate, cand_residual
            else:
                break
    if abs(residual) > tol_fix:
        raise FixedPointNotFound(
            f"no fixed point within {max_iter} iterations from {guess!r}; "
            f"last iterate {x!r} has residual {abs(residual):.3e}",
            last_iterate=x,
        )
    shift = PowerSeries.from_coefficients([x, 1.0], 0j, order=f.order)
    g = compose(f, shift)
    cs = list(g.coeffs)
    cs[0] = cs[0] - x
    if abs(cs[0]) > tol_fix:
        raise FixedPointNotFound(
            f"shifted map has residual {abs(cs[0]):.3e} at 0", last_iterate=x
        )
    cs[0] = 0j
    g = PowerSeries(tuple(cs), 0j)
    lam = g.coeffs[1]
    _check_multiplier(lam)
    return FixedPointFrame(x_star=x, multiplier=lam, shifted_map=g)
