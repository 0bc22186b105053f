"""Ratio-unbiased estimation of the squared Frobenius norm of the
population correlation matrix, tr(R^2)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .sample_stats import SampleSummary

__all__ = ["TraceEstimate", "ratio_unbiased_tr_r2"]


@dataclass(frozen=True)
class TraceEstimate:
    """tr(Rhat^2), the p(p-1)/d correction, and their difference."""

    tr_r2_hat: float
    correction: float
    estimate: float
    d: int

    def to_dict(self) -> dict:
        return {
            "tr_r2_hat": self.tr_r2_hat,
            "correction": self.correction,
            "estimate": self.estimate,
        }


def trace_correction(p: int, d: int) -> float:
    return p * (p - 1) / d


def make_trace_estimate(tr_r2_hat: float, p: int, d: int) -> TraceEstimate:
    if d < 1:
        raise DomainError("correction divisor d must be a positive integer")
    corr = trace_correction(p, d)
    return TraceEstimate(tr_r2_hat=float(tr_r2_hat), correction=corr, estimate=float(tr_r2_hat) - corr, d=int(d))


def ratio_unbiased_tr_r2(summary: SampleSummary, d: int) -> TraceEstimate:
    """tr(Rhat^2) - p(p-1)/d, whose ratio to tr(R^2) tends to one.

    The one-sample divisor is d = n - 1 and the pooled two-sample divisor
    is d = n1 + n2 - 2. The estimate is reported signed; it can be
    negative in tiny samples, and the test statistics apply the absolute
    value themselves.
    """
    tr_hat = float(np.sum(summary.corr**2))
    return make_trace_estimate(tr_hat, summary.p, d)
