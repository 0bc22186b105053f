"""Mean tests for data with more dimensions than observations.

Core pieces: correlation-matrix models (``corrmat``), reproducible
Gaussian sampling (``sampling``), sample moments with the 1/n divisor
(``sample_stats``), the ratio-unbiased trace estimator (``estimators``),
the four test statistics (``mean_tests``), the limiting mixture law
(``limit_law``), Gaussian moment oracles (``moments``) and a Monte Carlo
harness (``simulate``). A FastAPI service (``hdmean.service``) exposes
the pipeline over HTTP and the ``hdmean`` CLI is a thin client for it.
"""

from .errors import DegenerateDataError, DomainError, NumericError
from .estimators import TraceEstimate, ratio_unbiased_tr_r2
from .limit_law import (
    MixtureLaw,
    cdf,
    geometric_spike_law,
    mixture_from_spectrum,
    normal_law,
    p_value,
    plugin_law,
    sample_law,
    single_spike_law,
)
from .mean_tests import (
    TestReport,
    exact_tsd_null_equicorrelated,
    t_p1,
    t_p2,
    t_sd_one,
    t_sd_two,
)
from .sample_stats import SampleSummary, pooled_summary, summarize
from .sampling import Dataset, SeedSpec, sample_compound_fast, sample_dataset
from .simulate import (
    EmpiricalSummary,
    ExperimentConfig,
    corr_sq_cov_decay,
    density_curves,
    ks_distance,
    run_null_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateDataError",
    "DomainError",
    "NumericError",
    "TraceEstimate",
    "ratio_unbiased_tr_r2",
    "MixtureLaw",
    "cdf",
    "geometric_spike_law",
    "mixture_from_spectrum",
    "normal_law",
    "p_value",
    "plugin_law",
    "sample_law",
    "single_spike_law",
    "TestReport",
    "exact_tsd_null_equicorrelated",
    "t_p1",
    "t_p2",
    "t_sd_one",
    "t_sd_two",
    "SampleSummary",
    "pooled_summary",
    "summarize",
    "Dataset",
    "SeedSpec",
    "sample_compound_fast",
    "sample_dataset",
    "EmpiricalSummary",
    "ExperimentConfig",
    "corr_sq_cov_decay",
    "density_curves",
    "ks_distance",
    "run_null_experiment",
    "__version__",
]
