"""Continuous iterates f^t by two routes built on one factorization.

Chart route: the row-1 coefficients of the unitriangular factor are the
Taylor coefficients of a chart u with u(f(x)) = lambda * u(x), normalized to
unit derivative at the fixed point.  Then

    f^t(x) = u_inv(lambda^t * u(x)),

with lambda^t on the recorded principal branch.  Mode route: expanding the
same matrix power row gives f^t(x) = sum_k lambda^{k t} phi_k(x) where each
mode phi_k is a fixed power series about the fixed point.  The two routes are
algebraically identical and are cross-checked in the test suite.

Evaluation hygiene.  Truncated series only deserve trust inside an empirical
radius (a tail test on the top coefficients).  Three mechanisms keep
evaluations honest rather than silently wrong:

* every series evaluation is tail-checked, raising ``OutOfChart`` instead of
  returning junk;
* an argument of u beyond the chart's series radius is reached by numerical
  analytic continuation: Newton's method on the inverse chart series, warm
  started along a straight path from inside the radius.  This tracks the
  principal branch of u.  (Rewriting u(x) as u(f(x))/lambda would also
  extend the domain but follows the wrong branch once x crosses a critical
  point of the map, so it is deliberately not used.)
* a large chart argument lambda^t u(x) is reduced by an integer time shift,
  f^t = f^k o f^{t-k}, applying the map k extra times afterwards; both sides
  of that identity are analytic wherever the reduced evaluation is, so the
  reduction is branch-safe.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergent, OutOfChart
from .series import (
    FixedPointFrame,
    PowerSeries,
    evaluate_with_tail,
    tail_radius,
)
from .spectral import SpectralFactorization

# Relative size of the trailing stored terms tolerated at an evaluation
# site: beyond this the truncated value has fewer than ~6 reliable digits
# and is refused rather than returned.
EVAL_TAIL_TOL = 1e-6
# Relative last-term threshold that flags a non-convergent mode sum.
TAIL_TOL = 1e-10
# Fraction of the inverse-series radius targeted by the time-shift reduction.
INV_SAFETY = 0.75
# Continuation path control.
PATH_START_FRACTION = 0.8
PATH_STEP_FRACTION = 0.4
MAX_PATH_STEPS = 256
NEWTON_STEPS = 60
MAX_TIME_SHIFT = 64


@dataclass(frozen=True, eq=False)
class SchroederChart:
    """Linearizing chart at a fixed point.

    ``forward`` maps x near the fixed point to the linear coordinate (zero
    constant term, unit linear term, expanded about x*); ``inverse`` is its
    reversion, expanded about 0 with constant term x*.  ``r_eval`` is the
    user-facing evaluation radius; ``forward_radius``/``inverse_radius`` are
    derived tail-test radii of the two truncated series.
    """

    multiplier: complex
    forward: PowerSeries
    inverse: PowerSeries
    frame: FixedPointFrame
    r_eval: float

    def __post_init__(self):
        object.__setattr__(self, "forward_radius", tail_radius(self.forward.coeffs))
        object.__setattr__(self, "inverse_radius", tail_radius(self.inverse.coeffs))

    @property
    def x_star(self) -> complex:
        return self.frame.x_star


@dataclass(frozen=True, eq=False)
class IterateExpansion:
    """Mode expansion of f^t: modes[k] scaled by lambda^{k t} and summed.

    ``modes[0]`` is the constant series x*.
    """

    modes: tuple
    multiplier: complex
    x_star: complex

    @property
    def k_max(self) -> int:
        return len(self.modes) - 1


def default_chart_radius(frame: FixedPointFrame) -> float:
    """Conservative default: a tenth of the distance to the nearest other
    fixed point of the map (1.0 when there is none)."""
    g = frame.shifted_map
    # Fixed points of the shifted map solve g(d) - d = 0; drop the root at 0.
    poly = list(g.coeffs)
    poly[1] = poly[1] - 1.0
    deg = 0
    for k in range(len(poly) - 1, -1, -1):
        if poly[k] != 0:
            deg = k
            break
    if deg < 2:
        return 1.0
    # poly has a zero constant term by construction; factor the root at 0.
    reduced = poly[1 : deg + 1]
    roots = np.roots(reduced[::-1])
    dists = [abs(r) for r in roots if abs(r) > 1e-9]
    return 0.1 * min(dists) if dists else 1.0


def build_chart(
    S: SpectralFactorization,
    frame: FixedPointFrame,
    r_eval: float | None = None,
) -> SchroederChart:
    """Extract the linearizing chart from a factorization.

    The forward series is row 1 of the unitriangular factor re-based at the
    fixed point (unit derivative comes for free from unitriangularity).  The
    inverse series is row 1 of the *inverse* factor: the matrix inverse of an
    embedding matrix embeds the inverse map, so this row is the reversion of
    the forward series, and the recursion delivers its fast-decaying
    coefficients at full relative precision where a floating-point reversion
    of the (rapidly growing) forward coefficients would drown them in
    rounding noise.
    """
    forward = PowerSeries.from_coefficients(S.chart_matrix[1], frame.x_star)
    if forward.order < 2 or forward.coeffs[1] == 0:
        raise ValueError(
            "reversion impossible: zero linear coefficient "
            "(superattracting or degenerate chart)"
        )
    inv_coeffs = S.chart_matrix_inv[1].copy()
    inv_coeffs[0] = frame.x_star
    inverse = PowerSeries.from_coefficients(inv_coeffs, 0j)
    radius = default_chart_radius(frame) if r_eval is None else float(r_eval)
    return SchroederChart(
        multiplier=S.multiplier,
        forward=forward,
        inverse=inverse,
        frame=frame,
        r_eval=radius,
    )


def _checked_eval(series: PowerSeries, x) -> complex:
    value, tail = evaluate_with_tail(series, x)
    if tail > EVAL_TAIL_TOL * max(1.0, abs(value)):
        raise OutOfChart(
            f"series tail {tail:.3e} at argument {x!r} exceeds the trust "
            "threshold; value would be unreliable"
        )
    return value


def _newton_chart_value(chart: SchroederChart, target: complex, w0: complex) -> complex:
    """Solve chart.inverse(w) = target for w, warm started at w0."""
    inv = chart.inverse
    dinv = inv.derivative()
    w = w0
    tol = 1e-13 * max(1.0, abs(target))
    for _ in range(NEWTON_STEPS):
        value, tail = evaluate_with_tail(inv, w)
        if tail > EVAL_TAIL_TOL * max(1.0, abs(value)):
            raise OutOfChart(
                "continuation left the inverse series' trust region"
            )
        resid = value - target
        if abs(resid) <= tol:
            return w
        slope = dinv(w)
        if slope == 0:
            raise OutOfChart("continuation hit a critical point of the chart")
        w = w - resid / slope
    raise OutOfChart(f"continuation Newton failed to converge at {target!r}")


def chart_value(chart: SchroederChart, x) -> complex:
    """The chart coordinate u(x), continued past the series radius if needed.

    Wherever the forward series converges at x (judged by its trailing
    terms) this is a direct evaluation.  Beyond that the value is tracked
    along the segment from the radius edge to x by solving the inverse
    relation at each waypoint, which follows the principal analytic
    continuation of the chart.
    """
    x = complex(x)
    value, tail = evaluate_with_tail(chart.forward, x)
    if tail <= EVAL_TAIL_TOL * max(1.0, abs(value)):
        return value
    delta = x - chart.x_star
    r = chart.forward_radius
    if not math.isfinite(r) or r <= 0 or abs(delta) <= r:
        raise OutOfChart(
            f"forward chart series is unreliable at {x!r} and offers no "
            "continuation seed"
        )
    start = chart.x_star + delta * (PATH_START_FRACTION * r / abs(delta))
    w = _checked_eval(chart.forward, start)
    span = abs(x - start)
    steps = min(MAX_PATH_STEPS, max(1, math.ceil(span / (PATH_STEP_FRACTION * r))))
    for s in range(1, steps + 1):
        waypoint = start + (x - start) * (s / steps)
        w = _newton_chart_value(chart, waypoint, w)
    return w


def _apply_shifted_map(chart: SchroederChart, x: complex) -> complex:
    g = chart.frame.shifted_map
    return chart.x_star + g(x - chart.x_star)


def evaluate_iterate_chart(chart: SchroederChart, t: float, x) -> complex:
    """f^t(x) = inverse(lambda^t * forward(x)) on the principal branch.

    Raises :class:`OutOfChart` when x is outside the chart radius or when the
    evaluation cannot be completed reliably (divergent series argument).
    """
    x = complex(x)
    if abs(x - chart.x_star) > chart.r_eval * (1.0 + 1e-12):
        raise OutOfChart(
            f"|x - x*| = {abs(x - chart.x_star):.4g} exceeds the chart "
            f"radius {chart.r_eval:.4g}"
        )
    w = chart_value(chart, x)
    log_lam = cmath.log(chart.multiplier)
    shift_steps = 0
    if abs(chart.multiplier) > 1.0 and abs(w) > 0 and not math.isinf(
        chart.inverse_radius
    ):
        safe = INV_SAFETY * chart.inverse_radius
        magnitude = abs(w) * math.exp(t * log_lam.real)
        if magnitude > safe > 0:
            shift_steps = math.ceil(
                (math.log(magnitude) - math.log(safe)) / math.log(abs(chart.multiplier))
            )
            shift_steps = min(max(0, shift_steps), MAX_TIME_SHIFT)
    arg = cmath.exp((t - shift_steps) * log_lam) * w
    value = _checked_eval(chart.inverse, arg)
    for _ in range(shift_steps):
        value = _apply_shifted_map(chart, value)
    return value


def build_expansion(
    S: SpectralFactorization,
    frame: FixedPointFrame,
    k_max: int | None = None,
) -> IterateExpansion:
    """Mode series phi_k built from the factorization rows.

    phi_k has coefficients (inverse factor)[1, k] * (forward factor)[k, :],
    expanded about the fixed point; phi_0 is the constant x*.  ``k_max``
    defaults to dim - 1, using all computed spectral data.
    """
    n = S.dim
    if k_max is None:
        k_max = n - 1
    if not 0 <= k_max < n:
        raise ValueError(f"k_max must lie in [0, {n - 1}]")
    x_star = S.shift.x_star
    modes = [PowerSeries.constant(x_star, n, base_point=x_star)]
    for k in range(1, k_max + 1):
        coeffs = S.chart_matrix_inv[1, k] * S.chart_matrix[k]
        modes.append(PowerSeries.from_coefficients(coeffs, x_star))
    return IterateExpansion(
        modes=tuple(modes), multiplier=S.multiplier, x_star=x_star
    )


def evaluate_iterate_matrix(
    expansion: IterateExpansion, t: float, x, tail_tol: float = TAIL_TOL
) -> complex:
    """f^t(x) = sum_k lambda^{k t} phi_k(x), with a last-term convergence test.

    Raises :class:`NonConvergent` (carrying the last-term magnitude) when the
    final mode's contribution is not negligible against the running sum.
    """
    x = complex(x)
    log_lam = cmath.log(expansion.multiplier)
    total = 0j
    last = 0j
    for k, mode in enumerate(expansion.modes):
        last = cmath.exp(k * t * log_lam) * mode(x)
        total += last
    if abs(last) > tail_tol * max(abs(total), 1e-300):
        raise NonConvergent(
            f"mode sum tail {abs(last):.3e} is not negligible against "
            f"{abs(total):.3e}; raise the truncation order or move closer "
            "to the fixed point",
            last_term=abs(last),
        )
    return total


def verify_linearization(chart: SchroederChart, x0, n: int) -> float:
    """Max residual |u(x_{m+1}) - lambda u(x_m)| along a length-n orbit.

    Walks the exact map orbit from x0 and checks the chart linearizes it.
    Raises :class:`OutOfChart` with the offending step index when the orbit
    leaves the region where the chart series is trustworthy.
    """
    limit = min(chart.r_eval, chart.forward_radius)
    x = complex(x0)
    worst = 0.0
    w_prev = None
    for m in range(n + 1):
        if abs(x - chart.x_star) > limit * (1.0 + 1e-12):
            raise OutOfChart(
                f"orbit left the chart at step {m} "
                f"(|x - x*| = {abs(x - chart.x_star):.4g})",
                step=m,
            )
        w = _checked_eval(chart.forward, x)
        if w_prev is not None:
            worst = max(worst, abs(w - chart.multiplier * w_prev))
        w_prev = w
        x = _apply_shifted_map(chart, x)
    return worst


def chart_pipeline(
    f: PowerSeries,
    guess,
    dim: int,
    r_eval: float | None = None,
    tol_fix: float | None = None,
):
    """Convenience: locate the fixed point, factor, and build the chart.

    Returns (frame, factorization, chart).  The triangular matrix is built
    directly from the shifted map, which is the numerically stable route.
    """
    from .carleman import build_matrix
    from .series import TOL_FIX, find_fixed_point
    from .spectral import diagonalize

    frame = find_fixed_point(f, guess, tol_fix=TOL_FIX if tol_fix is None else tol_fix)
    mg = build_matrix(frame.shifted_map, dim)
    fact = diagonalize(mg, frame)
    chart = build_chart(fact, frame, r_eval=r_eval)
    return frame, fact, chart
