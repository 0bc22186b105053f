"""Reproducible multivariate Gaussian sampling.

Seeding follows a (master_seed, stream_id) scheme: every consumer derives
an independent generator from ``SeedSpec.generator()`` or, for replicated
work, ``SeedSpec.substream(k)``. Outputs depend only on those integers,
never on thread or process scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg.lapack import dpstrf

from .errors import DomainError, NumericError

__all__ = ["SeedSpec", "Dataset", "sample_dataset", "sample_compound_fast"]

_U64 = 2**64


@dataclass(frozen=True)
class SeedSpec:
    """Deterministic seed: a master seed plus a stream index."""

    master_seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, int) or not 0 <= v < _U64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer")

    def _sequence(self, *key: int) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id, *key))

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(self._sequence())

    def substream(self, *key: int) -> np.random.Generator:
        """Generator for a keyed sub-stream, e.g. one per replicate."""
        return np.random.default_rng(self._sequence(*key))


@dataclass(frozen=True)
class Dataset:
    """An n x p matrix of observations (rows) with provenance text."""

    rows: np.ndarray
    label: str = ""

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2:
            raise DomainError("dataset rows must form a 2-d matrix")
        if rows.shape[0] < 2:
            raise DomainError("dataset needs at least 2 observations")
        if not np.all(np.isfinite(rows)):
            raise DomainError("dataset entries must be finite")
        rows = rows.copy()
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def p(self) -> int:
        return self.rows.shape[1]


def symmetric_factor(sigma: np.ndarray) -> np.ndarray:
    """A matrix F with F @ F.T equal to the symmetric PSD input.

    Cholesky when positive definite; otherwise a pivoted Cholesky that
    truncates at the numerical rank, which reproduces singular targets
    (e.g. rank-one) exactly.
    """
    sigma = np.asarray(sigma, dtype=float)
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        pass
    c, piv, rank, info = dpstrf(sigma, lower=1)
    if info < 0:
        raise NumericError("covariance factorization failed")
    factor = np.tril(c)[:, :rank]
    perm = np.zeros_like(sigma)
    perm[piv - 1, np.arange(sigma.shape[0])] = 1.0
    factor = perm @ factor
    resid = np.max(np.abs(factor @ factor.T - sigma))
    if resid > 1e-8 * max(1.0, float(np.max(np.abs(sigma)))):
        raise NumericError("covariance is indefinite beyond tolerance")
    return factor


def sample_dataset(matrix, scale, mu, n: int, seed: SeedSpec, label: str = "") -> Dataset:
    """n i.i.d. Gaussian rows with correlation ``matrix``, sds ``scale``, mean ``mu``."""
    r = np.asarray(matrix, dtype=float)
    p = r.shape[0]
    scale = np.asarray(scale, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if r.ndim != 2 or r.shape != (p, p):
        raise DomainError("correlation matrix must be square")
    if scale.shape != (p,) or np.any(scale <= 0):
        raise DomainError("scale must be a strictly positive length-p vector")
    if mu.shape != (p,):
        raise DomainError("mu must be a length-p vector")
    if n < 2:
        raise DomainError("n must be at least 2")
    sigma = r * np.outer(scale, scale)
    factor = symmetric_factor(sigma)
    z = seed.generator().standard_normal((n, factor.shape[1]))
    return Dataset(rows=mu + z @ factor.T, label=label)


def compound_rows(rng: np.random.Generator, n: int, p: int, r: float) -> np.ndarray:
    """Rows of sqrt(r) Z 1 + sqrt(1-r) W: equicorrelated in O(np) time."""
    z = rng.standard_normal((n, 1))
    w = rng.standard_normal((n, p))
    return math.sqrt(r) * z + math.sqrt(1.0 - r) * w


def sample_compound_fast(p: int, r: float, n: int, seed: SeedSpec, label: str = "") -> Dataset:
    """Equicorrelated sampler that never materialises the p x p matrix.

    Distributionally identical to ``sample_dataset`` under the
    equicorrelated model with off-diagonal ``r``.
    """
    if p < 1:
        raise DomainError("p must be a positive integer")
    if not 0.0 <= r <= 1.0:
        raise DomainError("equicorrelation parameter r must lie in [0, 1]")
    if n < 2:
        raise DomainError("n must be at least 2")
    return Dataset(rows=compound_rows(seed.generator(), n, p, r), label=label)
