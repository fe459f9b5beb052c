import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import mapflow as mf
from mapflow.iterate import SchroederChart, chart_value
from mapflow.logistic import (
    logistic2_chart,
    logistic4_chart,
    logistic4_chart_coefficients,
    logistic4_chart_second,
    logistic4_iterate,
    logistic4_iterate_second,
)

DIM = 40


# --- build_chart ---------------------------------------------------------------

def test_origin_chart_matches_exact_coefficients(pipe4_origin):
    _, _, chart = pipe4_origin
    exact = logistic4_chart_coefficients(8)
    for k in range(1, 9):
        assert abs(chart.forward.coeffs[k] - float(exact[k - 1])) < 1e-12
    assert chart.forward.coeffs[0] == 0
    assert chart.forward.coeffs[1] == 1


def test_origin_chart_values_match_closed_form(pipe4_origin):
    _, _, chart = pipe4_origin
    for x in (0.01, 0.05, 0.2, 0.3):
        assert abs(chart.forward(x) - logistic4_chart(x)) < 1e-10


def test_mu2_chart_matches_log_series(pipe2_origin):
    _, _, chart = pipe2_origin
    expected = [0, 1, 1, 4 / 3]
    for k, c in enumerate(expected):
        assert abs(chart.forward.coeffs[k] - c) < 1e-12
    for x in (0.05, 0.1, 0.2):
        assert abs(chart.forward(x) - logistic2_chart(x)) < 1e-11


def test_second_chart_normalized_taylor(pipe4_second):
    # Hand expansion of the unit-derivative chart at 3/4: quadratic and cubic
    # coefficients are 2/3 and 16/9.
    _, _, chart = pipe4_second
    assert abs(chart.frame.x_star - 0.75) < 1e-12
    assert abs(chart.forward.coeffs[1] - 1.0) < 1e-13
    assert abs(chart.forward.coeffs[2] - 2 / 3) < 1e-12
    assert abs(chart.forward.coeffs[3] - 16 / 9) < 1e-12
    for x in (0.7, 0.8):
        assert abs(chart.forward(x) - logistic4_chart_second(x)) < 1e-10


def test_chart_functional_equation_residual(pipe4_origin, pipe4_second):
    for pipe in (pipe4_origin, pipe4_second):
        frame, _, chart = pipe
        lam = chart.multiplier
        g = frame.shifted_map
        # 20 samples within a conservative radius around the fixed point
        radius = mf.default_chart_radius(frame)
        for i in range(20):
            x = frame.x_star + radius * (i + 1) / 21 * (1 if i % 2 else -1)
            fx = frame.x_star + g(x - frame.x_star)
            resid = abs(chart.forward(fx) - lam * chart.forward(x))
            assert resid < 1e-8


def test_chart_inverse_roundtrip(pipe4_origin):
    _, _, chart = pipe4_origin
    for i in range(20):
        x = 0.002 * (i + 1)
        assert abs(chart.inverse(chart.forward(x)) - x) < 1e-8


def test_chart_inverse_matches_series_reversion(logistic4):
    # The recursion route and plain series reversion agree where reversion
    # is well conditioned.
    _, _, chart = mf.chart_pipeline(logistic4.truncated(12), 0.1, 12)
    rev = mf.revert(chart.forward)
    assert np.abs(rev.coeffs_array - chart.inverse.coeffs_array).max() < 1e-10


def test_default_radius_is_tenth_of_fixed_point_gap(logistic4, logistic2):
    frame = mf.find_fixed_point(logistic4, 0.1)
    assert abs(mf.default_chart_radius(frame) - 0.075) < 1e-10
    frame2 = mf.find_fixed_point(logistic2, 0.1)
    assert abs(mf.default_chart_radius(frame2) - 0.05) < 1e-10
    linear = mf.PowerSeries.from_coefficients([0, 3.0], order=8)
    assert mf.default_chart_radius(mf.find_fixed_point(linear, 0.0)) == 1.0


# --- evaluate_iterate_chart ------------------------------------------------------

def test_time_one_reproduces_the_map(pipe4_origin, logistic4):
    _, _, chart = pipe4_origin
    for x in (0.01, 0.05, 0.2):
        assert abs(mf.evaluate_iterate_chart(chart, 1.0, x) - logistic4(x)) < 1e-9


def test_half_time_matches_closed_form(pipe4_origin):
    _, _, chart = pipe4_origin
    v = mf.evaluate_iterate_chart(chart, 0.5, 0.05)
    assert abs(v - logistic4_iterate(0.5, 0.05)) < 1e-6


def test_second_chart_integer_time_coincides_with_principal(pipe4_second):
    _, _, chart = pipe4_second
    v = mf.evaluate_iterate_chart(chart, 2.0, 0.7)
    assert abs(v - logistic4_iterate(2.0, 0.7)) < 1e-6


def test_out_of_chart_radius_raises(pipe4_origin):
    _, _, chart = pipe4_origin
    with pytest.raises(mf.OutOfChart):
        mf.evaluate_iterate_chart(chart, 0.5, 0.7)  # r_eval is 0.6


def test_integer_consistency_both_routes(pipe4_origin, logistic4):
    frame, fact, chart = pipe4_origin
    expansion = mf.build_expansion(fact, frame)
    x0 = 0.02
    orbit = [complex(x0)]
    for _ in range(4):
        orbit.append(logistic4(orbit[-1]))
    for n in range(1, 5):
        assert abs(mf.evaluate_iterate_chart(chart, n, x0) - orbit[n]) < 1e-7
        assert abs(mf.evaluate_iterate_matrix(expansion, n, x0) - orbit[n]) < 1e-7


def test_semigroup_property_both_routes(pipe4_origin):
    frame, fact, chart = pipe4_origin
    expansion = mf.build_expansion(fact, frame)
    routes = (
        lambda t, x: mf.evaluate_iterate_chart(chart, t, x),
        lambda t, x: mf.evaluate_iterate_matrix(expansion, t, x),
    )
    for fn in routes:
        for s in (0.25, 0.5, 1.0):
            for t in (0.25, 0.5, 1.0):
                for x in (0.01, 0.02):
                    assert abs(fn(s + t, x) - fn(s, fn(t, x))) < 1e-7


def test_linear_map_iterates_exactly():
    # chart of a pure scaling map is the identity; f^t(x) = 3^t x
    f = mf.PowerSeries.from_coefficients([0, 3.0], order=8)
    _, _, chart = mf.chart_pipeline(f, 0.0, 8)
    for t in (0.5, 1.0, 2.3):
        for x in (0.1, -0.4, 0.2j):
            assert abs(mf.evaluate_iterate_chart(chart, t, x) - 3.0**t * x) < 1e-12


def test_negative_time_inverts_the_map(pipe4_origin, logistic4):
    _, _, chart = pipe4_origin
    x = 0.05
    y = mf.evaluate_iterate_chart(chart, -1.0, x)
    assert abs(logistic4(y) - x) < 1e-9


# --- continuation beyond the series radius --------------------------------------

def test_chart_value_continues_past_series_radius(pipe4_second):
    _, _, chart = pipe4_second
    # 0.3 lies far outside the second chart's series radius (~0.25 about 3/4)
    assert abs(0.3 - chart.x_star) > chart.forward_radius
    w = chart_value(chart, 0.3)
    assert abs(w - logistic4_chart_second(0.3)) < 1e-9


def test_branch_non_uniqueness(pipe4_origin, pipe4_second):
    _, _, chart0 = pipe4_origin
    _, _, chart1 = pipe4_second
    x = 0.3
    for t in (1.0, 2.0, 3.0):
        a = mf.evaluate_iterate_chart(chart0, t, x)
        b = mf.evaluate_iterate_chart(chart1, t, x)
        assert abs(a - b) < 1e-6
    v0 = mf.evaluate_iterate_chart(chart0, 0.5, x)
    v1 = mf.evaluate_iterate_chart(chart1, 0.5, x)
    assert abs(v0 - v1) > 1e-3
    assert abs(v1.imag) > 1e-3
    assert abs(v1 - logistic4_iterate_second(0.5, x)) < 1e-9


# --- the mode expansion ----------------------------------------------------------

def test_mode_zero_is_fixed_point_constant(pipe4_origin, pipe4_second):
    for pipe in (pipe4_origin, pipe4_second):
        frame, fact, _ = pipe
        expansion = mf.build_expansion(fact, frame)
        m0 = expansion.modes[0]
        assert m0.coeffs[0] == frame.x_star
        assert all(c == 0 for c in m0.coeffs[1:])


def test_mode_one_has_unit_linear_coefficient(pipe4_origin):
    frame, fact, _ = pipe4_origin
    expansion = mf.build_expansion(fact, frame)
    assert abs(expansion.modes[1].coeffs[1] - 1.0) < 1e-13


def test_modes_match_closed_form_taylor(pipe4_origin):
    # phi_k = (-1)^(k+1)/2 * (2 arcsin(sqrt x))^(2k) / (2k)! ; its Taylor
    # coefficients follow from exact convolution powers of the chart series.
    frame, fact, _ = pipe4_origin
    expansion = mf.build_expansion(fact, frame)
    u_exact = [Fraction(0)] + logistic4_chart_coefficients(11)
    for k in (1, 2):
        conv = [Fraction(1)] + [Fraction(0)] * 11
        for _ in range(k):
            out = [Fraction(0)] * 12
            for i, a in enumerate(conv):
                if a == 0:
                    continue
                for j, b in enumerate(u_exact):
                    if i + j < 12 and b != 0:
                        out[i + j] += a * b
            conv = out
        scale = Fraction((-1) ** (k + 1) * 4**k, 2 * math.factorial(2 * k))
        expected = [float(scale * c) for c in conv]
        got = expansion.modes[k].coeffs_array[:12]
        assert np.abs(got - np.array(expected)).max() < 1e-6


def test_modes_sum_to_identity_at_time_zero(pipe4_origin):
    frame, fact, _ = pipe4_origin
    expansion = mf.build_expansion(fact, frame)
    for x in (0.005, 0.01, 0.03):
        total = sum(mode(x) for mode in expansion.modes)
        assert abs(total - x) < 1e-8
        assert abs(mf.evaluate_iterate_matrix(expansion, 0.0, x) - x) < 1e-8


def test_matrix_route_matches_closed_form(pipe4_origin):
    frame, fact, _ = pipe4_origin
    expansion = mf.build_expansion(fact, frame)
    v = mf.evaluate_iterate_matrix(expansion, 1.5, 0.02)
    assert abs(v - logistic4_iterate(1.5, 0.02)) < 1e-6


def test_routes_agree_at_random_samples(pipe4_origin):
    frame, fact, chart = pipe4_origin
    expansion = mf.build_expansion(fact, frame)
    rng = np.random.default_rng(42)
    for _ in range(20):
        t = rng.uniform(0.0, 2.0)
        x = rng.uniform(-0.05, 0.05)
        a = mf.evaluate_iterate_chart(chart, t, complex(x))
        b = mf.evaluate_iterate_matrix(expansion, t, complex(x))
        assert abs(a - b) < 1e-7


def test_mode_sum_flags_divergence(pipe4_origin):
    frame, fact, _ = pipe4_origin
    expansion = mf.build_expansion(fact, frame)
    with pytest.raises(mf.NonConvergent) as err:
        mf.evaluate_iterate_matrix(expansion, 12.0, 0.05)
    assert err.value.last_term is not None


def test_k_max_bounds(pipe4_origin):
    frame, fact, _ = pipe4_origin
    short = mf.build_expansion(fact, frame, k_max=5)
    assert len(short.modes) == 6
    with pytest.raises(ValueError):
        mf.build_expansion(fact, frame, k_max=DIM)


def test_complex_multiplier_pipeline():
    lam = 1.5 + 0.5j
    f = mf.PowerSeries.from_coefficients([0, lam, 0.3 - 0.2j], order=20)
    frame, fact, chart = mf.chart_pipeline(f, 0.0, 20, r_eval=0.3)
    assert abs(frame.multiplier - lam) < 1e-12
    for delta in (0.01, 0.004 - 0.006j):
        resid = abs(chart.forward(f(delta)) - lam * chart.forward(delta))
        assert resid < 1e-10
    # semigroup at fractional times
    fn = lambda t, x: mf.evaluate_iterate_chart(chart, t, x)
    x = 0.008 + 0.003j
    assert abs(fn(1.1, x) - fn(0.6, fn(0.5, x))) < 1e-9


@settings(max_examples=25, deadline=None)
@given(
    st.floats(1.3, 3.0),
    st.floats(-0.5, 0.5),
    st.floats(-0.5, 0.5),
)
def test_pipeline_linearizes_random_repelling_maps(a1, a2, a3):
    # maps fixing 0 with a real repelling multiplier: the chart must satisfy
    # its defining equation and invert cleanly near the fixed point
    f = mf.PowerSeries.from_coefficients([0.0, a1, a2, a3], order=16)
    frame, fact, chart = mf.chart_pipeline(f, 0.0, 16, r_eval=0.5)
    lam = frame.multiplier
    for delta in (0.004, -0.006, 0.003j):
        resid = abs(chart.forward(f(delta)) - lam * chart.forward(delta))
        assert resid < 1e-8
        assert abs(chart.inverse(chart.forward(delta)) - delta) < 1e-8


# --- verify_linearization ---------------------------------------------------------

def test_linearization_residual_mu2(pipe2_origin):
    _, _, chart = pipe2_origin
    assert mf.verify_linearization(chart, 0.01, 5) < 1e-9


def test_linearization_residual_mu4(pipe4_origin):
    _, _, chart = pipe4_origin
    assert mf.verify_linearization(chart, 0.001, 3) < 1e-7


def test_linearization_stationary_orbit(pipe4_origin):
    _, _, chart = pipe4_origin
    assert mf.verify_linearization(chart, 0.0, 5) == 0.0


def test_linearization_reports_escape_step(pipe2_origin):
    _, _, chart = pipe2_origin
    with pytest.raises(mf.OutOfChart) as err:
        mf.verify_linearization(chart, 0.01, 12)
    assert err.value.step is not None


# --- normalization invariance -----------------------------------------------------

def test_chart_rescaling_leaves_iterates_unchanged(pipe4_origin):
    _, _, chart = pipe4_origin
    c = 2.5 - 0.4j
    fwd = mf.PowerSeries(
        tuple(c * v for v in chart.forward.coeffs), chart.forward.base_point
    )
    inv_coeffs = [chart.inverse.coeffs[0]] + [
        chart.inverse.coeffs[k] / c**k for k in range(1, chart.inverse.order)
    ]
    inv = mf.PowerSeries(tuple(inv_coeffs), 0j)
    scaled = SchroederChart(
        multiplier=chart.multiplier,
        forward=fwd,
        inverse=inv,
        frame=chart.frame,
        r_eval=chart.r_eval,
    )
    for t in (0.3, 1.0, 1.7):
        for x in (0.01, 0.04):
            a = mf.evaluate_iterate_chart(chart, t, x)
            b = mf.evaluate_iterate_chart(scaled, t, x)
            assert abs(a - b) < 1e-9
