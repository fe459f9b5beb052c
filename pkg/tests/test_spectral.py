import io
import math

import numpy as np
import pytest

import mapflow as mf
from mapflow.carleman import build_matrix, compose_pad, leading_window, scaled_deviation
from mapflow.logistic import logistic_series
from mapflow.series import FixedPointFrame, PowerSeries, find_fixed_point
from mapflow.spectral import (
    diagonalize,
    fractional_power,
    left_eigenrow,
    matrix_log,
    write_factorization_csv,
)


def factor(mu, guess, dim):
    f = logistic_series(mu, dim)
    frame = find_fixed_point(f, guess)
    mg = build_matrix(frame.shifted_map, dim)
    return frame, mg, diagonalize(mg, frame)


# --- diagonalize ----------------------------------------------------------------

def test_hand_computed_chart_entries():
    # (lambda - lambda^2)^{-1} * Mg[1,2] = (4-16)^{-1} * (-4) = 1/3 and the
    # next column gives 8/45.
    _, _, S = factor(4.0, 0.1, 8)
    assert abs(S.chart_matrix[1, 2] - 1 / 3) < 1e-13
    assert abs(S.chart_matrix[1, 3] - 8 / 45) < 1e-13


def test_diagonal_input_gives_identity_factors():
    frame = FixedPointFrame(
        x_star=0.0,
        multiplier=2.0,
        shifted_map=PowerSeries.from_coefficients([0, 2], order=4),
    )
    mg = build_matrix(frame.shifted_map, 4)
    assert np.array_equal(mg.entries, np.diag([1.0, 2.0, 4.0, 8.0]).astype(complex))
    S = diagonalize(mg, frame)
    assert np.array_equal(S.chart_matrix, np.eye(4, dtype=complex))
    assert np.array_equal(S.chart_matrix_inv, np.eye(4, dtype=complex))


def test_mu2_chart_row_matches_log_series():
    _, _, S = factor(2.0, 0.1, 8)
    row = left_eigenrow(S)
    expected = [0, 1, 1, 4 / 3, 2, 16 / 5, 16 / 3, 64 / 7]
    assert np.abs(row - np.array(expected)).max() < 1e-12


def test_factorization_invariants():
    dim = 12
    _, mg, S = factor(4.0, 0.1, dim)
    eye = np.eye(dim)
    assert np.abs(S.chart_matrix @ S.chart_matrix_inv - eye).max() < 1e-10
    product = S.chart_matrix @ mg.entries @ S.chart_matrix_inv
    assert scaled_deviation(product, np.diag(S.eigenvalues)) < 1e-9
    assert np.allclose(np.diag(S.chart_matrix), 1.0, atol=0)
    assert np.allclose(np.diag(S.chart_matrix_inv), 1.0, atol=0)


def test_diagonalization_column_relative_at_large_dim():
    # Verifying diagonality at deep columns cancels huge intermediates, so
    # the meaningful scale there is the column's own eigenvalue.
    dim = 40
    _, mg, S = factor(4.0, 0.1, dim)
    product = S.chart_matrix @ mg.entries @ S.chart_matrix_inv
    dev = scaled_deviation(product.T, np.diag(S.eigenvalues).T)
    assert dev < 1e-10


def test_chart_matrix_rows_are_convolution_powers():
    dim = 16
    _, _, S = factor(4.0, 0.1, dim)
    psi = S.chart_matrix[1]
    row = np.zeros(dim, dtype=complex)
    row[0] = 1
    for j in range(1, dim):
        row = np.convolve(row, psi)[:dim]
        assert scaled_deviation(S.chart_matrix[j], row) < 1e-9


def test_left_eigenrow_is_left_eigenvector():
    dim = 16
    _, mg, S = factor(4.0, 0.1, dim)
    psi = left_eigenrow(S)
    w = leading_window(dim, 2, 1)
    lhs = (psi @ mg.entries)[:w]
    rhs = (S.multiplier * psi)[:w]
    assert scaled_deviation(lhs, rhs) < 1e-9


def test_left_eigenrow_diagonal_input():
    frame = FixedPointFrame(
        x_star=0.0,
        multiplier=2.0,
        shifted_map=PowerSeries.from_coefficients([0, 2], order=5),
    )
    S = diagonalize(build_matrix(frame.shifted_map, 5), frame)
    assert np.array_equal(left_eigenrow(S), np.eye(5, dtype=complex)[1])


def test_resonant_multiplier_rejected():
    # multiplier i: powers repeat with period 4
    frame = FixedPointFrame(
        x_star=0.0,
        multiplier=1j,
        shifted_map=PowerSeries.from_coefficients([0, 1j, 0.5], order=8),
    )
    mg = build_matrix(frame.shifted_map, 8)
    with pytest.raises(mf.ResonantEigenvalues) as err:
        diagonalize(mg, frame)
    assert err.value.pair is not None


def test_superattracting_rejected():
    frame = FixedPointFrame(
        x_star=0.0,
        multiplier=0.0,
        shifted_map=PowerSeries.from_coefficients([0, 0, 1], order=6),
    )
    mg = build_matrix(frame.shifted_map, 6)
    with pytest.raises(mf.Superattracting):
        diagonalize(mg, frame)


def test_non_triangular_input_rejected():
    f = logistic_series(4.0, 8)
    frame = find_fixed_point(f, 0.7)
    M = build_matrix(f, 8)  # not shifted, not triangular
    with pytest.raises(mf.ShiftInconsistent):
        diagonalize(M, frame)


# --- fractional powers ----------------------------------------------------------

def test_power_at_zero_is_identity():
    dim = 16
    f = logistic_series(4.0, dim)
    frame, mg, S = factor(4.0, 0.1, dim)
    M = build_matrix(f, dim)
    P = fractional_power(S, M, 0.0)
    assert np.abs(P.entries - np.eye(dim)).max() < 1e-12


def test_power_at_one_reproduces_matrix():
    dim = 16
    f = logistic_series(4.0, dim)
    _, _, S = factor(4.0, 0.1, dim)
    M = build_matrix(f, dim)
    P = fractional_power(S, M, 1.0)
    w = leading_window(dim, 2, 1)
    assert scaled_deviation(P.entries[:w, :w], M.entries[:w, :w]) < 1e-9


def test_power_at_two_row_one_is_composed_map():
    dim = 16
    f = logistic_series(4.0, dim)
    _, _, S = factor(4.0, 0.1, dim)
    M = build_matrix(f, dim)
    P = fractional_power(S, M, 2.0)
    ff = compose_pad(f, f, dim)
    w = leading_window(dim, 2, 2)
    assert np.abs(P.entries[1, :w] - ff.coeffs_array[:w]).max() < 1e-9
    squared = M.entries @ M.entries
    assert scaled_deviation(P.entries[:w, :w], squared[:w, :w]) < 1e-9


def test_power_semigroup_in_t():
    dim = 16
    f = logistic_series(4.0, dim)
    _, _, S = factor(4.0, 0.1, dim)
    M = build_matrix(f, dim)
    w = 6
    for s, t in ((0.3, 0.7), (0.5, 0.5), (1.2, -0.2)):
        lhs = fractional_power(S, M, s + t).entries
        rhs = fractional_power(S, M, s).entries @ fractional_power(S, M, t).entries
        assert np.abs(lhs[:w, :w] - rhs[:w, :w]).max() < 1e-8


def test_power_output_keeps_embedding_structure():
    dim = 16
    f = logistic_series(4.0, dim)
    _, _, S = factor(4.0, 0.1, dim)
    M = build_matrix(f, dim)
    P = fractional_power(S, M, 0.6)
    assert np.abs(P.entries[0] - np.eye(dim)[0]).max() < 1e-12
    w = leading_window(dim, 2, 1)
    row = np.zeros(dim, dtype=complex)
    row[0] = 1
    for j in range(1, w):
        row = np.convolve(row, P.entries[1])[:dim]
        assert scaled_deviation(P.entries[j, :w], row[:w]) < 1e-9


# --- matrix logarithm -----------------------------------------------------------

def test_log_of_diagonal_matrix():
    frame = FixedPointFrame(
        x_star=0.0,
        multiplier=2.0,
        shifted_map=PowerSeries.from_coefficients([0, 2], order=4),
    )
    mg = build_matrix(frame.shifted_map, 4)
    S = diagonalize(mg, frame)
    L = matrix_log(S, mg)
    expected = np.diag([0.0, math.log(2), 2 * math.log(2), 3 * math.log(2)])
    assert np.abs(L.entries - expected).max() < 1e-13


def test_log_row_one_logistic_coefficients():
    dim = 16
    f = logistic_series(4.0, dim)
    _, mg, S = factor(4.0, 0.1, dim)
    L = matrix_log(S, build_matrix(f, dim))
    assert abs(L.entries[1, 1] - math.log(4)) < 1e-12
    assert abs(L.entries[1, 2] + (2 / 3) * math.log(2)) < 1e-12


def test_log_is_time_derivative_of_powers():
    dim = 16
    f = logistic_series(4.0, dim)
    _, _, S = factor(4.0, 0.1, dim)
    M = build_matrix(f, dim)
    L = matrix_log(S, M)
    h = 1e-4
    diff = (
        fractional_power(S, M, h).entries - fractional_power(S, M, -h).entries
    ) / (2 * h)
    w = leading_window(dim, 2, 1)
    assert np.abs(diff[1, :w] - L.entries[1, :w]).max() < 1e-6
    # whole leading window, scaled: the h^2 error carries (k log lambda)^3
    assert scaled_deviation(diff[:w, :w], L.entries[:w, :w]) < 1e-6


def test_log_without_matrix_argument():
    _, mg, S = factor(4.0, 0.1, 8)
    L = matrix_log(S)
    assert abs(L.entries[1, 1] - math.log(4)) < 1e-12
    assert L.chart_series is not None
    assert L.chart_series.base_point == 0


def test_principal_branch_for_negative_multiplier():
    _, _, S = factor(4.0, 0.7, 12)
    assert abs(S.multiplier + 2.0) < 1e-10
    assert abs(S.branch.log_multiplier - complex(math.log(2), math.pi)) < 1e-12
    assert S.branch.convention == "principal"


def test_factorization_csv_blocks():
    _, _, S = factor(4.0, 0.1, 6)
    buf = io.StringIO()
    write_factorization_csv(S, buf)
    text = buf.getvalue()
    lines = text.splitlines()
    assert lines[0].startswith("factorization dim=6 lambda=4")
    assert sum(1 for ln in lines if ln.startswith("block=")) == 3
    assert len(lines) == 1 + 3 + 6 + 6 + 1
