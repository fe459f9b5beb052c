"""Continuous-time dynamics extracted from the embedding-matrix logarithm.

Row 1 of the matrix logarithm holds the Taylor coefficients of a vector
field G with the defining property that the continuous iterates solve
dx/dt = G(x), x(0) = x0.  The same field has a closed chart form
G = Log(lambda) * u(x) / u'(x), which this module uses as an independent
cross-check when building a field (a mismatch almost always means a wrong
logarithm branch).

Also here: a classical fixed-step RK4 integrator for the extracted ODE
(complex state; the field of a negative multiplier is genuinely complex), the
exact validity window of the single-branch field for the fully chaotic
logistic map, and a chain-rule Lyapunov-exponent estimator along the discrete
orbit (the chaotic orbit leaves any fixed-point chart, so differentiating the
series would be dishonest; the chain rule has the identical limit).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .carleman import CarlemanMatrix, scaled_deviation
from .errors import BranchMismatch, ChartEscape, OutOfChart
from .iterate import SchroederChart
from .series import PowerSeries, _trunc_div

# Field cross-check tolerance (row-scaled, leading half of the coefficients).
TOL_FIELD_XCHECK = 1e-7
# Default endpoint tolerance for the RK4 integration tests at dt = 1e-3.
TOL_ODE = 1e-6

LN2 = math.log(2.0)


@dataclass(frozen=True, eq=False)
class FlowField:
    """Vector field of the continuous iteration, as a series about x*."""

    series: PowerSeries
    chart: SchroederChart
    multiplier: complex

    @property
    def x_star(self) -> complex:
        return self.series.base_point


def build_field(L: CarlemanMatrix, chart: SchroederChart) -> FlowField:
    """Assemble the flow field from a matrix logarithm and its chart.

    Consumes the logarithm's chart-frame row (``chart_series``), which is the
    numerically meaningful object for every fixed point.  The coefficients
    are cross-checked against Log(lambda) * u / u' computed by truncated
    series division; disagreement raises :class:`BranchMismatch`.
    """
    g = L.chart_series
    if g is None:
        raise ValueError(
            "matrix carries no chart-frame row; build it with matrix_log()"
        )
    if g.base_point != chart.x_star:
        raise ValueError(
            f"log expanded about {g.base_point!r} but chart sits at "
            f"{chart.x_star!r}"
        )
    n = min(g.order, chart.forward.order)
    u = chart.forward.coeffs_array[:n]
    du = np.zeros(n, dtype=complex)
    du[: n - 1] = [k * u[k] for k in range(1, n)]
    log_lam = cmath.log(chart.multiplier)
    alt = log_lam * _trunc_div(u, du)
    window = max(2, n // 2)
    dev = scaled_deviation(g.coeffs_array[:window], alt[:window])
    if dev > TOL_FIELD_XCHECK:
        raise BranchMismatch(
            f"field coefficients disagree with Log(lambda)*u/u' by {dev:.3e}; "
            "check the logarithm branch / chart pairing"
        )
    return FlowField(series=g, chart=chart, multiplier=chart.multiplier)


def evaluate_field(field: FlowField, x) -> complex:
    """Series evaluation of the field; domain-guarded by the chart radius."""
    x = complex(x)
    if abs(x - field.x_star) > field.chart.r_eval * (1.0 + 1e-12):
        raise OutOfChart(
            f"|x - x*| = {abs(x - field.x_star):.4g} exceeds the chart "
            f"radius {field.chart.r_eval:.4g}"
        )
    return field.series(x)


def integrate_flow(field: FlowField, x0, t_end: float, dt: float = 1e-3):
    """Classical fixed-step RK4 for dx/dt = G(x) from x0.

    Returns the trajectory as a list of (t, x) pairs, complex state included.
    Leaves the chart -> :class:`ChartEscape` carrying the time reached and
    the partial trajectory.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    x_star = field.x_star
    r = field.chart.r_eval * (1.0 + 1e-12)
    steps = max(1, round(abs(t_end) / dt))
    h = t_end / steps
    g = field.series
    x = complex(x0)
    trajectory = [(0.0, x)]
    for i in range(steps):
        if abs(x - x_star) > r:
            raise ChartEscape(
                f"trajectory left the chart at t = {i * h:.6g}",
                t_reached=i * h,
                trajectory=trajectory,
            )
        k1 = g(x)
        k2 = g(x + 0.5 * h * k1)
        k3 = g(x + 0.5 * h * k2)
        k4 = g(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        trajectory.append(((i + 1) * h, x))
    if abs(x - x_star) > r:
        raise ChartEscape(
            f"trajectory left the chart at t = {t_end:.6g}",
            t_reached=t_end,
            trajectory=trajectory,
        )
    return trajectory


def validity_window(x: float) -> float:
    """Time up to which the single-branch field drives the mu=4 logistic map.

    The closed-form iterate winds around the branch cut of the inverse
    cosine; the principal-branch field is only obeyed until
    t_max(x) = ln(pi / arccos(1 - 2x)) / ln 2.  Specific to the fully
    chaotic logistic map; x must lie in (0, 1].
    """
    if not 0.0 < x <= 1.0:
        raise ValueError(f"x = {x!r} outside (0, 1]")
    theta = math.acos(1.0 - 2.0 * x)
    return math.log(math.pi / theta) / LN2


def lyapunov_logistic(n: int, x0: float) -> float:
    """Chain-rule Lyapunov estimate for the mu=4 logistic map.

    Averages ln|f'(x_m)| over n steps of the discrete orbit from x0.  The
    expected limit for a generic seed is ln 2.  A derivative hitting exactly
    zero (orbit through 1/2) is perturbed by 1e-12 and flagged with a
    warning.
    """
    if n < 1000:
        raise ValueError("use at least 1000 iterates for a meaningful average")
    if not 0.0 < x0 < 1.0:
        raise ValueError(
            f"seed {x0!r} rejected: orbit must start inside (0, 1) off the "
            "fixed points"
        )
    x = float(x0)
    total = 0.0
    for _ in range(n):
        d = abs(4.0 - 8.0 * x)
        if d == 0.0:
            warnings.warn(
                "orbit hit the critical point exactly; perturbing by 1e-12",
                stacklevel=2,
            )
            x += 1e-12
            d = abs(4.0 - 8.0 * x)
        total += math.log(d)
        x = 4.0 * x * (1.0 - x)
    return total / n


def field_pipeline(
    f: PowerSeries,
    guess,
    dim: int,
    r_eval: float | None = None,
    tol_fix: float | None = None,
) -> FlowField:
    """Fixed point -> factorization -> chart -> log -> field, in one call."""
    from .iterate import chart_pipeline
    from .spectral import matrix_log

    _, fact, chart = chart_pipeline(f, guess, dim, r_eval=r_eval, tol_fix=tol_fix)
    return build_field(matrix_log(fact), chart)
