"""Spectral factorization of triangular Carleman matrices.

An upper-triangular embedding matrix (the matrix of a map fixing 0) has the
multiplier powers lambda^j on its diagonal.  When those are mutually distinct
it is diagonalized by an upper unitriangular matrix computed entry by entry
from a short recursion; the factorization then gives arbitrary real powers
and the logarithm by acting on the diagonal alone.

The unitriangular factor is itself a Carleman matrix: its row 1 holds the
coefficients of the linearizing chart and row j is the j-fold convolution of
row 1.  That observation is what connects the matrix picture to the
functional (chart) picture used by the iterate module.

Branch convention: all non-integer powers use the principal logarithm of the
multiplier, arg in (-pi, pi], applied as lambda^{j t} = exp(j t Log lambda).
This keeps the diagonal a one-parameter semigroup in t (and makes a negative
multiplier produce genuinely complex non-integer iterates).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .carleman import CarlemanMatrix, ShiftTransform, shift_transform
from .errors import ResonantEigenvalues, ShiftInconsistent, Superattracting
from .series import FixedPointFrame, PowerSeries, TOL_RES


@dataclass(frozen=True)
class LogBranch:
    """Record of the logarithm branch used for non-integer powers."""

    log_multiplier: complex
    convention: str = "principal"


@dataclass(frozen=True, eq=False)
class SpectralFactorization:
    """Unitriangular diagonalization of a triangular embedding matrix.

    ``chart_matrix`` (upper unitriangular) and ``chart_matrix_inv`` satisfy
    chart_matrix @ M(g) @ chart_matrix_inv = diag(multiplier^j).  ``shift``
    carries the recentering transforms so powers of the original (unshifted)
    matrix can be assembled, and ``branch`` pins the logarithm convention.
    """

    multiplier: complex
    chart_matrix: np.ndarray
    chart_matrix_inv: np.ndarray
    shift: ShiftTransform
    branch: LogBranch

    def __post_init__(self):
        for name in ("chart_matrix", "chart_matrix_inv"):
            a = np.asarray(getattr(self, name), dtype=complex)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def dim(self) -> int:
        return self.chart_matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        """The diagonal: multiplier^j for j = 0 .. dim-1."""
        return self.multiplier ** np.arange(self.dim)


def diagonalize(
    Mg: CarlemanMatrix, frame: FixedPointFrame, tol_res: float = TOL_RES
) -> SpectralFactorization:
    """Factor an upper-triangular embedding matrix.

    Preconditions checked: ``Mg`` upper triangular, its (1,1) entry matches
    the frame multiplier, the multiplier is not numerically zero
    (:class:`Superattracting`) and no two diagonal powers collide
    (:class:`ResonantEigenvalues` with the offending index pair).

    The two unitriangular factors are filled column by column:
    entry (j, k) of the forward factor is
    (lambda^j - lambda^k)^{-1} * sum_{l=j}^{k-1} V[j,l] Mg[l,k],
    and of the inverse factor
    (lambda^k - lambda^j)^{-1} * sum_{l=j+1}^{k} W[l,k] Mg[j,l]
    (the mirrored denominator is what makes W the exact inverse of V).
    """
    n = Mg.dim
    entries = Mg.entries
    scale = max(1.0, float(np.abs(entries).max()))
    sub = float(np.abs(np.tril(entries, -1)).max())
    if sub > 1e-12 * scale:
        raise ShiftInconsistent(
            f"matrix is not upper triangular (sub-diagonal {sub:.3e}); "
            "shift to the fixed point first"
        )
    lam = complex(frame.multiplier)
    if abs(entries[1, 1] - lam) > 1e-9 * max(1.0, abs(lam)):
        raise ShiftInconsistent(
            f"frame multiplier {lam!r} disagrees with matrix diagonal "
            f"{entries[1, 1]!r}"
        )
    if abs(lam) <= tol_res:
        raise Superattracting(f"multiplier {lam!r} is numerically zero")
    powers = lam ** np.arange(n)
    for j in range(n):
        for k in range(j + 1, n):
            gap = abs(powers[j] - powers[k])
            if gap < tol_res * max(abs(powers[j]), abs(powers[k])):
                raise ResonantEigenvalues(
                    f"eigenvalues lambda^{j} and lambda^{k} are "
                    f"indistinguishable (gap {gap:.3e})",
                    pair=(j, k),
                )
    V = np.eye(n, dtype=complex)
    for k in range(1, n):
        for j in range(k - 1, -1, -1):
            acc = V[j, j:k] @ entries[j:k, k]
            V[j, k] = acc / (powers[j] - powers[k])
    # Inverse factor from M W = W Lambda; note the denominator is
    # (lambda^k - lambda^j), the mirror of the forward recursion's.
    W = np.eye(n, dtype=complex)
    for k in range(1, n):
        for j in range(k - 1, -1, -1):
            acc = entries[j, j + 1 : k + 1] @ W[j + 1 : k + 1, k]
            W[j, k] = acc / (powers[k] - powers[j])
    return SpectralFactorization(
        multiplier=lam,
        chart_matrix=V,
        chart_matrix_inv=W,
        shift=shift_transform(frame.x_star, n),
        branch=LogBranch(log_multiplier=cmath.log(lam)),
    )


def _sandwich(S: SpectralFactorization, diag: np.ndarray):
    """T^{-1} V^{-1} diag V T together with the chart-frame core."""
    core = (S.chart_matrix_inv * diag[np.newaxis, :]) @ S.chart_matrix
    full = S.shift.inverse @ core @ S.shift.forward
    return full, core


def fractional_power(
    S: SpectralFactorization, M: CarlemanMatrix, t: float
) -> CarlemanMatrix:
    """The real power M^t assembled from the factorization of M.

    The diagonal is raised entrywise as exp(j * t * Log multiplier) on the
    recorded principal branch, so powers form a semigroup in t and integer t
    reproduces integer matrix powers on the leading window.  Row 1 of the
    result is the coefficient list of the t-th iterate; the same row in the
    fixed-point chart is attached as ``chart_series`` (for a nonzero shift
    the recentered full matrix is the only numerically fragile part, the
    chart core is not).
    """
    if M.dim != S.dim:
        raise ValueError("factorization and matrix dimensions differ")
    j = np.arange(S.dim)
    diag = np.exp(j * (t * S.branch.log_multiplier))
    full, core = _sandwich(S, diag)
    return CarlemanMatrix(
        entries=full,
        source_map=PowerSeries.from_coefficients(
            full[1], M.source_map.base_point
        ),
        chart_series=PowerSeries.from_coefficients(core[1], S.shift.x_star),
    )


def matrix_log(
    S: SpectralFactorization, M: CarlemanMatrix | None = None
) -> CarlemanMatrix:
    """Principal logarithm: T^{-1} V^{-1} diag(j Log lambda) V T.

    Row 1 holds the coefficients of the continuous-time vector field
    generating the iteration; ``chart_series`` carries the same coefficients
    in the fixed-point chart, which is what the flow module consumes.  ``M``
    is optional and only pins the dimension check and the base point of the
    row-1 series.
    """
    if M is not None and M.dim != S.dim:
        raise ValueError("factorization and matrix dimensions differ")
    base = 0j if M is None else M.source_map.base_point
    j = np.arange(S.dim)
    diag = j * S.branch.log_multiplier
    full, core = _sandwich(S, diag)
    return CarlemanMatrix(
        entries=full,
        source_map=PowerSeries.from_coefficients(full[1], base),
        chart_series=PowerSeries.from_coefficients(core[1], S.shift.x_star),
    )


def left_eigenrow(S: SpectralFactorization) -> np.ndarray:
    """Row 1 of the unitriangular factor: the multiplier's left eigenvector.

    Its entries are the Taylor coefficients of the linearizing chart, and its
    convolution powers rebuild the deeper rows of the factor.
    """
    return S.chart_matrix[1].copy()


# --- factorization CSV interchange -------------------------------------------

def write_factorization_csv(S: SpectralFactorization, fh) -> None:
    """Three blocks (forward factor, inverse factor, diagonal) with headers."""
    from .carleman import _format_complex

    fh.write(
        f"factorization dim={S.dim} lambda={_format_complex(S.multiplier)} "
        f"branch={S.branch.convention}\n"
    )
    for name, block in (
        ("V", S.chart_matrix),
        ("V_inv", S.chart_matrix_inv),
        ("diag", S.eigenvalues[np.newaxis, :]),
    ):
        fh.write(f"block={name}\n")
        for row in block:
            fh.write(",".join(_format_complex(z) for z in row) + "\n")
