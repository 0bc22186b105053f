"""Exact Gaussian moment machinery.

A brute-force pairing oracle for mixed moments, closed forms for the
low-order cases, the hypergeometric formula for the second moment of an
inner-product correlation coefficient, inverse-chi-square moments and the
second-order expansion of E[m^2 / (sum X_i^2 sum Y_i^2)]. These serve as
test oracles and calibration constants for the test statistics.
"""

from __future__ import annotations

import numpy as np

from .corrmat import validate_correlation
from .errors import DomainError

__all__ = [
    "isserlis_moment",
    "closed_form_moment",
    "expected_rhat_sq",
    "inv_chisq_moments",
    "inv_product_expansion",
    "pair_average_cov",
    "cov_b1_b2",
]

_MAX_INDICES = 12  # 12 indices -> 10395 pairings; 14 would exceed 1e5

CLOSED_FORM_KINDS = ("m112244", "m222", "m2222", "m44")


def isserlis_moment(indices, matrix) -> float:
    """E[X_i1 * ... * X_ik] for zero-mean Gaussians via pairing enumeration.

    ``indices`` are 1-based and may repeat; odd-length products are 0.
    Pairings are enumerated by always matching the first unpaired index,
    so memory stays linear in the number of indices.
    """
    m = validate_correlation(matrix)
    idx = [int(i) - 1 for i in indices]
    if len(idx) > _MAX_INDICES:
        raise DomainError(f"at most {_MAX_INDICES} indices supported")
    if any(not 0 <= i < m.shape[0] for i in idx):
        raise DomainError("indices must lie in 1..p")
    if len(idx) % 2 == 1:
        return 0.0
    return _pairing_sum(tuple(idx), m)


def _pairing_sum(idx: tuple, m: np.ndarray) -> float:
    if not idx:
        return 1.0
    first, rest = idx[0], idx[1:]
    total = 0.0
    for k in range(len(rest)):
        total += m[first, rest[k]] * _pairing_sum(rest[:k] + rest[k + 1 :], m)
    return total


def _corr4(matrix) -> np.ndarray:
    m = validate_correlation(matrix)
    if m.shape != (4, 4):
        raise DomainError("a 4x4 correlation matrix is required")
    return m


def closed_form_moment(kind: str, corr4) -> float:
    """Closed forms for selected mixed moments of a 4-variate Gaussian.

    Kinds name the exponent pattern: ``m112244`` is E[X1 X2 X3^2 X4^2],
    ``m222`` is E[X1^2 X2^2 X3^2], ``m2222`` is E[X1^2 X2^2 X3^2 X4^2]
    and ``m44`` is E[X1^4 X2^4].
    """
    m = _corr4(corr4)
    r12, r13, r14 = m[0, 1], m[0, 2], m[0, 3]
    r23, r24, r34 = m[1, 2], m[1, 3], m[2, 3]
    if kind == "m112244":
        return (
            r12
            + 2 * r12 * r34**2
            + 2 * r13 * r23
            + 2 * r14 * r24
            + 4 * r13 * r24 * r34
            + 4 * r14 * r23 * r34
        )
    if kind == "m222":
        return 1 + 2 * r12**2 + 2 * r13**2 + 2 * r23**2 + 8 * r12 * r13 * r23
    if kind == "m2222":
        return (
            1
            + 2 * (r12**2 + r13**2 + r14**2 + r23**2 + r24**2 + r34**2)
            + 4 * (r12**2 * r34**2 + r13**2 * r24**2 + r14**2 * r23**2)
            + 8 * (r12 * r23 * r13 + r12 * r24 * r14 + r23 * r34 * r24 + r13 * r34 * r14)
            + 16 * (r12 * r23 * r34 * r14 + r12 * r24 * r34 * r13 + r13 * r23 * r24 * r14)
        )
    if kind == "m44":
        return 9 + 72 * r12**2 + 24 * r12**4
    raise DomainError(f"unknown moment kind {kind!r}; expected one of {CLOSED_FORM_KINDS}")


def expected_rhat_sq(m: int, r: float) -> float:
    """E[rhat^2] for the inner-product correlation of m bivariate pairs.

    ``rhat = sum X_i Y_i / sqrt(sum X_i^2 sum Y_i^2)`` for i.i.d. standard
    bivariate normals with correlation r. Evaluated as
    ``1 - (m-1)/m * (1 - r^2) * S`` where S is a Gauss hypergeometric
    series in r^2 with nonnegative terms, summed to absolute term
    tolerance 1e-15. ``r = +-1`` returns exactly 1.
    """
    if not isinstance(m, (int, np.integer)) or m < 4:
        raise DomainError("m must be an integer >= 4")
    if not -1.0 <= r <= 1.0:
        raise DomainError("r must lie in [-1, 1]")
    z = r * r
    if z >= 1.0:
        return 1.0
    series = 1.0
    term = 1.0
    k = 1
    while True:
        term *= 2.0 * k * z / (m + 2.0 * k)
        series += term
        if term < 1e-15:
            break
        k += 1
    return 1.0 - (m - 1.0) / m * (1.0 - z) * series


def inv_chisq_moments(k: int) -> tuple[float, float]:
    """Mean and variance of 1/chi-square(k): 1/(k-2) and 2/((k-2)^2 (k-4))."""
    if not isinstance(k, (int, np.integer)) or k < 5:
        raise DomainError("k must be an integer >= 5 (the variance needs k > 4)")
    mean = 1.0 / (k - 2)
    var = 2.0 / ((k - 2) ** 2 * (k - 4))
    return mean, var


def inv_product_expansion(m: int, r: float) -> float:
    """Second-order expansion of E[m^2 / (sum X_i^2 * sum Y_i^2)].

    Returns ``1 + (4 + 2 r^2)/m + (12 + 8 r^2 + 8 r^4)/m^2``; the
    remainder is O(m^-3) for m >= 11.
    """
    if not isinstance(m, (int, np.integer)) or m < 11:
        raise DomainError("m must be an integer >= 11")
    if not -1.0 <= r <= 1.0:
        raise DomainError("r must lie in [-1, 1]")
    z = r * r
    return 1.0 + (4.0 + 2.0 * z) / m + (12.0 + 8.0 * z + 8.0 * z * z) / m**2


def pair_average_cov(matrix, pair_a, pair_b, m: int) -> float:
    """Covariance of the averages of X_i X_j and X_k X_l over m i.i.d. draws.

    Equals ``(r_ik r_jl + r_il r_jk) / m``; with ``pair_a == pair_b`` it
    is the variance ``(1 + r_ij^2) / m``.
    """
    mat = validate_correlation(matrix)
    if m < 1:
        raise DomainError("m must be a positive integer")
    i, j = (int(v) - 1 for v in pair_a)
    k, l = (int(v) - 1 for v in pair_b)
    for v in (i, j, k, l):
        if not 0 <= v < mat.shape[0]:
            raise DomainError("pair indices must lie in 1..p")
    return (mat[i, k] * mat[j, l] + mat[i, l] * mat[j, k]) / m


def cov_b1_b2(corr4, m: int) -> float:
    """Covariance of the averaged products over coordinates (1,2) and (3,4)."""
    return pair_average_cov(_corr4(corr4), (1, 2), (3, 4), m)
