"""Population correlation matrices.

Structured generators (equicorrelated, block-spiked, autoregressive),
spectrum utilities, and construction of a unit-diagonal matrix realising a
prescribed eigenvalue profile via Givens rotations.

Matrices are plain ``numpy`` arrays; a valid correlation matrix is
symmetric, has unit diagonal, entries in [-1, 1] and is positive
semidefinite up to a small tolerance.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, NumericError

__all__ = [
    "validate_correlation",
    "compound_symmetric",
    "block_spiked",
    "geometric_spike_spectrum",
    "ar1",
    "check_majorization",
    "from_spectrum",
    "spectrum",
    "trace_power",
]

PSD_TOL = 1e-8
_SUM_TOL = 1e-10


def validate_correlation(matrix, *, psd_tol: float = PSD_TOL, check_psd: bool = True) -> np.ndarray:
    """Check correlation-matrix invariants and return the array.

    Raises
    ------
    DomainError
        If the matrix is not square symmetric with unit diagonal and
        entries in [-1, 1], or (when ``check_psd``) its smallest
        eigenvalue is below ``-psd_tol``.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DomainError("correlation matrix must be square")
    if not np.array_equal(m, m.T):
        raise DomainError("correlation matrix must be symmetric")
    if not np.all(np.diag(m) == 1.0):
        raise DomainError("correlation matrix must have unit diagonal")
    if np.max(np.abs(m)) > 1.0:
        raise DomainError("correlation entries must lie in [-1, 1]")
    if check_psd and np.linalg.eigvalsh(m)[0] < -psd_tol:
        raise DomainError("correlation matrix is not positive semidefinite")
    return m


def compound_symmetric(p: int, r: float) -> np.ndarray:
    """Equicorrelated p x p matrix with every off-diagonal entry equal to r.

    Its eigenvalues are ``1 + (p-1)r`` once and ``1 - r`` with
    multiplicity ``p - 1``.
    """
    if p < 1:
        raise DomainError("p must be a positive integer")
    if not 0.0 <= r <= 1.0:
        raise DomainError("equicorrelation parameter r must lie in [0, 1]")
    out = np.full((p, p), float(r))
    np.fill_diagonal(out, 1.0)
    return out


def block_spiked(p: int, r: float) -> np.ndarray:
    """Identity matrix with a leading equicorrelated block of size floor(p**r).

    The same ``r`` sets both the block size exponent and the within-block
    correlation.
    """
    if p < 1:
        raise DomainError("p must be a positive integer")
    if not 0.0 < r < 1.0:
        raise DomainError("block parameter r must lie in (0, 1)")
    m = int(math.floor(p**r))
    out = np.eye(p)
    out[:m, :m] = compound_symmetric(m, r)
    return out


def geometric_spike_spectrum(p: int, tau: float) -> np.ndarray:
    """Eigenvalue profile with floor(log(p+2)) geometrically decaying spikes.

    The spikes are ``1 + tau * 2**-i * (1 - 2**-m)**-1 * sqrt(p)`` for
    ``i = 1..m`` with ``m = floor(log(p+2))`` (natural log), followed by a
    bulk of ones, one fractional value and trailing zeros; the total is
    exactly ``p`` and the profile majorizes the flat spectrum.
    """
    if p < 2:
        raise DomainError("p must be at least 2")
    if tau < 0:
        raise DomainError("tau must be nonnegative")
    m = int(math.floor(math.log(p + 2)))
    root_p = math.sqrt(p)
    cut = int(math.floor(tau * root_p))
    top = p - cut
    if top <= m:
        raise DomainError("dimension too small for this spike strength")
    lam = np.zeros(p)
    geom = 2.0 ** -np.arange(1, m + 1)
    lam[:m] = 1.0 + tau * root_p * geom / (1.0 - 2.0**-m)
    lam[m : top - 1] = 1.0
    lam[top - 1] = 1.0 + cut - tau * root_p
    return lam


def ar1(p: int, gamma: float) -> np.ndarray:
    """First-order autoregressive correlation matrix gamma**|i-j|."""
    if p < 1:
        raise DomainError("p must be a positive integer")
    if abs(gamma) >= 1.0:
        raise DomainError("autoregression parameter must satisfy |gamma| < 1")
    idx = np.arange(p)
    return float(gamma) ** np.abs(idx[:, None] - idx[None, :])


def check_majorization(spec) -> bool:
    """True iff the descending profile can be the spectrum of a correlation matrix.

    The condition is that every partial sum of the leading k values is at
    least k and the total equals the length, both within 1e-10.

    Raises
    ------
    DomainError
        If the input is not a nonnegative, descending 1-d profile.
    """
    lam = _as_spectrum(spec)
    partial = np.cumsum(lam)
    k = np.arange(1, lam.size + 1)
    if not np.all(partial >= k - _SUM_TOL):
        return False
    return bool(abs(partial[-1] - lam.size) <= _SUM_TOL)


def _as_spectrum(spec) -> np.ndarray:
    lam = np.asarray(spec, dtype=float)
    if lam.ndim != 1 or lam.size < 1:
        raise DomainError("spectrum must be a nonempty 1-d sequence")
    if np.any(lam < 0):
        raise DomainError("spectrum values must be nonnegative")
    if np.any(np.diff(lam) > 0):
        raise DomainError("spectrum must be sorted in descending order")
    return lam


def from_spectrum(spec, seed: int | None = None) -> np.ndarray:
    """Build a correlation matrix with the prescribed eigenvalues.

    Starts from ``diag(spec)`` and applies Givens rotations, each one
    driving a diagonal entry to exactly 1 while preserving the spectrum;
    at most ``p - 1`` rotations are needed. The result is one
    representative of the (non-unique) matrices with this spectrum and is
    deterministic given ``spec``; ``seed`` permutes the order in which
    diagonal entries are visited.

    Raises
    ------
    DomainError
        ``"not a correlation spectrum"`` when majorization fails.
    """
    lam = _as_spectrum(spec)
    if not check_majorization(lam):
        raise DomainError("not a correlation spectrum")
    p = lam.size
    a = np.diag(lam).copy()
    scan = np.arange(p)
    if seed is not None:
        scan = np.random.default_rng(seed).permutation(p)
    tol = 1e-12
    for _ in range(p - 1):
        d = a.diagonal()
        low = high = -1
        for k in scan:
            if low < 0 and d[k] < 1.0 - tol:
                low = k
            elif high < 0 and d[k] > 1.0 + tol:
                high = k
            if low >= 0 and high >= 0:
                break
        if low < 0 or high < 0:
            break
        _rotate_to_unit(a, low, high)
    if np.max(np.abs(a.diagonal() - 1.0)) > 1e-8:
        raise NumericError("rotation sweep failed to reach a unit diagonal")
    a = 0.5 * (a + a.T)
    np.clip(a, -1.0, 1.0, out=a)
    np.fill_diagonal(a, 1.0)
    return a


def _rotate_to_unit(a: np.ndarray, i: int, j: int) -> None:
    """Rotate rows/columns (i, j) of symmetric ``a`` so a[i, i] becomes 1.

    Requires a[i, i] < 1 < a[j, j]; solves t**2 (ajj-1) - 2 t aij +
    (aii-1) = 0 for the tangent, taking the smaller root for stability.
    """
    aii, ajj, aij = a[i, i], a[j, j], a[i, j]
    disc = aij * aij - (aii - 1.0) * (ajj - 1.0)
    root = math.sqrt(disc)
    sign = 1.0 if aij >= 0 else -1.0
    t_big = (aij + sign * root) / (ajj - 1.0)
    t = (aii - 1.0) / ((ajj - 1.0) * t_big)
    c = 1.0 / math.hypot(1.0, t)
    s = t * c
    ri = c * a[i, :] - s * a[j, :]
    rj = s * a[i, :] + c * a[j, :]
    a[i, :], a[j, :] = ri, rj
    ci = c * a[:, i] - s * a[:, j]
    cj = s * a[:, i] + c * a[:, j]
    a[:, i], a[:, j] = ci, cj
    a[i, i] = 1.0
    a[j, i] = a[i, j]


def spectrum(matrix) -> np.ndarray:
    """Eigenvalues of a symmetric matrix in descending order."""
    m = np.asarray(matrix, dtype=float)
    return np.linalg.eigvalsh(m)[::-1].copy()


def trace_power(matrix, k: int) -> float:
    """Trace of the k-th matrix power, k in 1..8."""
    if not 1 <= int(k) <= 8 or int(k) != k:
        raise DomainError("power k must be an integer in 1..8")
    m = np.asarray(matrix, dtype=float)
    if k == 1:
        return float(np.trace(m))
    return float(np.trace(np.linalg.matrix_power(m, int(k))))
