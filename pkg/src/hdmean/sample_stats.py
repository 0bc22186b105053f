"""Sample moments with the 1/n covariance divisor.

The covariance divisor is n (pooled: n1 + n2), not the more common n - 1;
the centering constants of the downstream test statistics are calibrated
to this convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, DomainError
from .sampling import Dataset

__all__ = ["SampleSummary", "summarize", "pooled_summary"]


@dataclass(frozen=True)
class SampleSummary:
    """Mean (or mean difference), covariance, its diagonal and correlation."""

    n_eff: int
    p: int
    mean: np.ndarray
    cov: np.ndarray
    diag: np.ndarray
    corr: np.ndarray


def _rows(data) -> np.ndarray:
    if isinstance(data, Dataset):
        return data.rows
    rows = np.asarray(data, dtype=float)
    if rows.ndim != 2:
        raise DomainError("data must be a 2-d observations-by-variables matrix")
    return rows


def assert_no_degenerate_columns(variances: np.ndarray, column_scale: np.ndarray) -> None:
    """Reject columns whose variance is zero relative to their magnitude."""
    floor = (1e-12 * (column_scale + 1.0)) ** 2
    bad = np.flatnonzero(variances <= floor)
    if bad.size:
        j = int(bad[0])
        raise DegenerateDataError(f"column {j} has zero sample variance", column=j)


def _correlation(cov: np.ndarray, diag: np.ndarray) -> np.ndarray:
    root = np.sqrt(diag)
    corr = cov / root[:, None] / root[None, :]
    np.clip(corr, -1.0, 1.0, out=corr)
    np.fill_diagonal(corr, 1.0)
    return corr


def summarize(data) -> SampleSummary:
    """Sample mean, covariance (1/n divisor) and correlation matrix."""
    rows = _rows(data)
    n, p = rows.shape
    if n < 2:
        raise DomainError("need at least 2 observations")
    mean = rows.mean(axis=0)
    centered = rows - mean
    cov = centered.T @ centered / n
    diag = np.diag(cov).copy()
    assert_no_degenerate_columns(diag, np.abs(rows).max(axis=0))
    return SampleSummary(n_eff=n, p=p, mean=mean, cov=cov, diag=diag, corr=_correlation(cov, diag))


def pooled_summary(d1, d2) -> SampleSummary:
    """Pooled covariance over two samples; ``mean`` holds the mean difference."""
    rows1, rows2 = _rows(d1), _rows(d2)
    if rows1.shape[1] != rows2.shape[1]:
        raise DomainError(
            f"dimension mismatch: {rows1.shape[1]} vs {rows2.shape[1]} variables"
        )
    n1, n2 = rows1.shape[0], rows2.shape[0]
    if n1 < 2 or n2 < 2:
        raise DomainError("each sample needs at least 2 observations")
    p = rows1.shape[1]
    m1, m2 = rows1.mean(axis=0), rows2.mean(axis=0)
    centered = np.vstack([rows1 - m1, rows2 - m2])
    cov = centered.T @ centered / (n1 + n2)
    diag = np.diag(cov).copy()
    scale = np.maximum(np.abs(rows1).max(axis=0), np.abs(rows2).max(axis=0))
    assert_no_degenerate_columns(diag, scale)
    return SampleSummary(
        n_eff=n1 + n2, p=p, mean=m1 - m2, cov=cov, diag=diag, corr=_correlation(cov, diag)
    )
