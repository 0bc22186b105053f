"""Monte Carlo harness for null distributions of the test statistics.

Replicates are generated under the null (zero mean, or equal means for
the two-sample variants) for a chosen correlation model, the statistic is
evaluated per replicate, and the empirical draws are compared to a
limiting mixture law through a Kolmogorov-Smirnov distance and density
curves. Replicate k always consumes sub-stream k of the experiment seed,
so results are identical for any worker count.

The per-replicate statistic path avoids forming the p x p sample
correlation matrix: with Y the centered, variance-normalized data,
tr(Rhat^2) equals the squared Frobenius norm of whichever Gram matrix of
Y is smaller (n x n or p x p). Equality with the summary-based path is
covered by tests.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import corrmat
from .errors import DegenerateDataError, DomainError
from .limit_law import MixtureLaw, mixture_from_spectrum, normal_law, sample_law
from .mean_tests import (
    ONE_SAMPLE_VARIANTS,
    TWO_SAMPLE_VARIANTS,
    VARIANTS,
    build_one_sample,
    build_two_sample,
)
from .sampling import SeedSpec, compound_rows, symmetric_factor
from .sample_stats import assert_no_degenerate_columns

__all__ = [
    "ExperimentConfig",
    "EmpiricalSummary",
    "run_null_experiment",
    "ks_distance",
    "density_curves",
    "corr_sq_cov_decay",
    "DecayRow",
    "MODELS",
]

MODELS = ("identity", "compound", "all_ones", "block", "ar1", "geometric")

# sub-stream name spaces under one experiment seed
_REPLICATE, _KS_DRAWS, _DENSITY_DRAWS = 0, 1, 2


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one null experiment."""

    variant: str
    model: str
    p: int
    reps: int
    seed: SeedSpec
    n: int | None = None
    n1: int | None = None
    n2: int | None = None
    model_params: dict = field(default_factory=dict)
    law: MixtureLaw | str = "auto"
    grid_lo: float = -4.0
    grid_hi: float = 6.0
    n_grid: int = 201
    mc_cdf_draws: int = 200_000

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown variant {self.variant!r}")
        if self.model not in MODELS:
            raise DomainError(f"unknown model {self.model!r}")
        if self.reps < 100:
            raise DomainError("reps must be at least 100")
        if self.p < 1:
            raise DomainError("p must be positive")
        if self.variant in ONE_SAMPLE_VARIANTS:
            if self.n is None or self.n < 4:
                raise DomainError("one-sample experiments need n >= 4")
        else:
            if self.n1 is None or self.n2 is None or self.n1 < 2 or self.n2 < 2:
                raise DomainError("two-sample experiments need n1, n2 >= 2")
            if self.n1 + self.n2 < 5:
                raise DomainError("two-sample experiments need n1 + n2 >= 5")
        if not isinstance(self.law, (MixtureLaw, str)):
            raise DomainError("law must be a MixtureLaw, 'auto' or 'normal'")
        if isinstance(self.law, str) and self.law not in ("auto", "normal"):
            raise DomainError("law string must be 'auto' or 'normal'")
        if self.grid_lo >= self.grid_hi:
            raise DomainError("grid_lo must be below grid_hi")
        if self.n_grid < 0:
            raise DomainError("n_grid must be nonnegative")


@dataclass(frozen=True)
class EmpiricalSummary:
    """Replicate draws plus their comparison against the resolved law."""

    draws: np.ndarray
    ks_vs_law: float
    density_grid: np.ndarray
    law: MixtureLaw
    elapsed_s: float


def model_spectrum(model: str, p: int, params: dict) -> np.ndarray:
    """Population eigenvalue profile of a model, used for 'auto' laws."""
    if model == "identity":
        return np.ones(p)
    if model == "compound":
        r = float(params["r"])
        lam = np.full(p, 1.0 - r)
        lam[0] = 1.0 + (p - 1) * r
        return lam
    if model == "all_ones":
        lam = np.zeros(p)
        lam[0] = p
        return lam
    if model == "block":
        return corrmat.spectrum(corrmat.block_spiked(p, float(params["r"])))
    if model == "ar1":
        return corrmat.spectrum(corrmat.ar1(p, float(params["gamma"])))
    if model == "geometric":
        return corrmat.geometric_spike_spectrum(p, float(params["tau"]))
    raise DomainError(f"unknown model {model!r}")


def _make_sampler(model: str, p: int, params: dict):
    """(rng, n) -> observation rows under the model, with factors precomputed."""
    if model == "identity":
        return lambda rng, n: rng.standard_normal((n, p))
    if model == "compound":
        r = float(params["r"])
        if not 0.0 <= r <= 1.0:
            raise DomainError("equicorrelation parameter r must lie in [0, 1]")
        return lambda rng, n: compound_rows(rng, n, p, r)
    if model == "all_ones":
        # one shared scalar per observation; columns are exact copies
        return lambda rng, n: np.repeat(rng.standard_normal((n, 1)), p, axis=1)
    if model == "block":
        factor = symmetric_factor(corrmat.block_spiked(p, float(params["r"])))
    elif model == "ar1":
        factor = symmetric_factor(corrmat.ar1(p, float(params["gamma"])))
    elif model == "geometric":
        matrix = corrmat.from_spectrum(corrmat.geometric_spike_spectrum(p, float(params["tau"])))
        factor = symmetric_factor(matrix)
    else:
        raise DomainError(f"unknown model {model!r}")
    ft = factor.T.copy()
    return lambda rng, n: rng.standard_normal((n, ft.shape[0])) @ ft


def one_sample_ingredients(rows: np.ndarray) -> tuple[float, float]:
    """(mean' diag^-1 mean, tr(Rhat^2)) without forming the p x p matrix."""
    n = rows.shape[0]
    mean = rows.mean(axis=0)
    centered = rows - mean
    var = np.einsum("ij,ij->j", centered, centered) / n
    assert_no_degenerate_columns(var, np.abs(rows).max(axis=0))
    quad = float(np.sum(mean**2 / var))
    return quad, _tr_corr_sq(centered, n * var)


def two_sample_ingredients(rows1: np.ndarray, rows2: np.ndarray) -> tuple[float, float]:
    """(diff' diag^-1 diff, tr(Rhat^2)) for the pooled two-sample summary."""
    n = rows1.shape[0] + rows2.shape[0]
    m1, m2 = rows1.mean(axis=0), rows2.mean(axis=0)
    centered = np.vstack([rows1 - m1, rows2 - m2])
    var = np.einsum("ij,ij->j", centered, centered) / n
    scale = np.maximum(np.abs(rows1).max(axis=0), np.abs(rows2).max(axis=0))
    assert_no_degenerate_columns(var, scale)
    diff = m1 - m2
    quad = float(np.sum(diff**2 / var))
    return quad, _tr_corr_sq(centered, n * var)


def _tr_corr_sq(centered: np.ndarray, ss: np.ndarray) -> float:
    y = centered / np.sqrt(ss)
    gram = y @ y.T if y.shape[0] <= y.shape[1] else y.T @ y
    return float(np.einsum("ij,ij->", gram, gram))


def _replicate_statistic(cfg: ExperimentConfig, sampler, rng) -> float:
    if cfg.variant in ONE_SAMPLE_VARIANTS:
        quad, tr_hat = one_sample_ingredients(sampler(rng, cfg.n))
        return build_one_sample(cfg.variant, quad, tr_hat, cfg.p, cfg.n).statistic
    rows1 = sampler(rng, cfg.n1)
    rows2 = sampler(rng, cfg.n2)
    quad, tr_hat = two_sample_ingredients(rows1, rows2)
    return build_two_sample(cfg.variant, quad, tr_hat, cfg.p, cfg.n1, cfg.n2).statistic


def _draw_block(cfg: ExperimentConfig, start: int, stop: int) -> np.ndarray:
    sampler = _make_sampler(cfg.model, cfg.p, cfg.model_params)
    out = np.empty(stop - start)
    for k in range(start, stop):
        rng = cfg.seed.substream(_REPLICATE, k)
        try:
            out[k - start] = _replicate_statistic(cfg, sampler, rng)
        except DegenerateDataError as exc:
            raise DegenerateDataError(f"replicate {k}: {exc}", column=exc.column) from exc
    return out


def simulate_draws(cfg: ExperimentConfig, workers: int = 1) -> np.ndarray:
    """One statistic per replicate; identical output for any worker count."""
    if workers <= 1:
        return _draw_block(cfg, 0, cfg.reps)
    bounds = np.linspace(0, cfg.reps, workers + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(
            pool.map(_draw_block, [cfg] * workers, bounds[:-1].tolist(), bounds[1:].tolist())
        )
    return np.concatenate(parts)


def resolve_law(cfg: ExperimentConfig) -> MixtureLaw:
    if isinstance(cfg.law, MixtureLaw):
        return cfg.law
    if cfg.law == "normal":
        return normal_law()
    return mixture_from_spectrum(model_spectrum(cfg.model, cfg.p, cfg.model_params))


def run_null_experiment(cfg: ExperimentConfig, workers: int = 1) -> EmpiricalSummary:
    """Simulate the null statistic and compare it to the resolved law."""
    started = time.perf_counter()
    law = resolve_law(cfg)
    draws = simulate_draws(cfg, workers=workers)
    ks = ks_distance(draws, law, n_cdf_draws=cfg.mc_cdf_draws, seed=cfg.seed, _stream=_KS_DRAWS)
    grid = density_curves(
        draws, law, cfg.grid_lo, cfg.grid_hi, cfg.n_grid, seed=cfg.seed, _stream=_DENSITY_DRAWS
    )
    return EmpiricalSummary(
        draws=draws,
        ks_vs_law=ks,
        density_grid=grid,
        law=law,
        elapsed_s=time.perf_counter() - started,
    )


def ks_distance(
    draws,
    law: MixtureLaw,
    n_cdf_draws: int = 200_000,
    seed: SeedSpec = SeedSpec(),
    _stream: int = _KS_DRAWS,
) -> float:
    """Sup distance between the empirical CDF of draws and the law's CDF.

    The law's CDF is evaluated by Monte Carlo at the draw points, with
    both one-sided gaps checked at each jump of the empirical CDF.
    """
    x = np.sort(np.asarray(draws, dtype=float).ravel())
    if x.size == 0:
        raise DomainError("draws must be nonempty")
    ref = sample_law(law, n_cdf_draws, _SubstreamSeed(seed, _stream))
    ref.sort()
    law_cdf = np.searchsorted(ref, x, side="right") / n_cdf_draws
    steps = np.arange(1, x.size + 1) / x.size
    return float(np.max(np.maximum(steps - law_cdf, law_cdf - (steps - 1.0 / x.size))))


def silverman_bandwidth(draws: np.ndarray) -> float:
    sd = float(np.std(draws))
    q75, q25 = np.percentile(draws, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34) if q75 > q25 else sd
    if spread <= 0:
        spread = max(abs(float(np.mean(draws))), 1.0) * 1e-3
    return 0.9 * spread * draws.size ** (-0.2)


def _kde(samples: np.ndarray, grid: np.ndarray) -> np.ndarray:
    bw = silverman_bandwidth(samples)
    # histogram first so cost is bins x grid, not samples x grid
    lo = min(samples.min(), grid.min()) - 6 * bw
    hi = max(samples.max(), grid.max()) + 6 * bw
    n_bins = max(1000, grid.size * 4)
    counts, edges = np.histogram(samples, bins=n_bins, range=(lo, hi))
    mids = 0.5 * (edges[:-1] + edges[1:])
    nz = counts > 0
    diff = (grid[:, None] - mids[None, nz]) / bw
    dens = np.exp(-0.5 * diff**2) @ counts[nz]
    return dens / (samples.size * bw * math.sqrt(2.0 * math.pi))


def density_curves(
    draws,
    law: MixtureLaw,
    grid_lo: float,
    grid_hi: float,
    n_grid: int,
    seed: SeedSpec = SeedSpec(),
    law_draws: int = 200_000,
    _stream: int = _DENSITY_DRAWS,
) -> np.ndarray:
    """Columns (x, empirical density, law density) on an even grid.

    Both densities are Gaussian kernel estimates with Silverman's
    bandwidth; the law's is estimated from a fresh Monte Carlo sample.
    """
    x = np.asarray(draws, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("draws must be nonempty")
    if grid_lo >= grid_hi:
        raise DomainError("grid_lo must be below grid_hi")
    if n_grid == 0:
        return np.empty((0, 3))
    grid = np.linspace(grid_lo, grid_hi, n_grid)
    rng_draws = sample_law(law, law_draws, _SubstreamSeed(seed, _stream))
    return np.column_stack([grid, _kde(x, grid), _kde(rng_draws, grid)])


class _SubstreamSeed:
    """Adapter giving sample_law a keyed sub-stream of an experiment seed."""

    def __init__(self, seed: SeedSpec, *key: int):
        self._seed = seed
        self._key = key

    def generator(self) -> np.random.Generator:
        return self._seed.substream(*self._key)


@dataclass(frozen=True)
class DecayRow:
    """Monte Carlo covariance of two squared sample correlations at one m."""

    m: int
    cov: float
    m_abs_cov: float
    se: float


def uncentered_sq_corr_pair(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(rhat_12^2, rhat_34^2) per replicate for draws of shape (reps, m, 4).

    rhat_ij is the inner-product correlation sum x_i x_j /
    sqrt(sum x_i^2 sum x_j^2) over the m i.i.d. 4-vectors.
    """
    s = np.einsum("rki,rkj->rij", x, x)
    u = s[:, 0, 1] ** 2 / (s[:, 0, 0] * s[:, 1, 1])
    v = s[:, 2, 3] ** 2 / (s[:, 2, 2] * s[:, 3, 3])
    return u, v


def corr_sq_cov_decay(corr4, m_grid, reps: int, seed: SeedSpec) -> list[DecayRow]:
    """Monte Carlo estimate of Cov(rhat_12^2, rhat_34^2) along an m grid.

    The covariance decays like 1/m, so the table reports m |cov| as the
    (approximately stable) normalized size, plus the Monte Carlo standard
    error of the covariance estimate.
    """
    mat = np.asarray(corr4, dtype=float)
    if mat.shape != (4, 4):
        raise DomainError("a 4x4 correlation matrix is required")
    m_grid = [int(m) for m in m_grid]
    if any(m < 5 for m in m_grid):
        raise DomainError("every m must be at least 5")
    if reps < 10_000:
        raise DomainError("reps must be at least 10000")
    factor_t = symmetric_factor(mat).T.copy()
    rows = []
    for idx, m in enumerate(m_grid):
        rng = seed.substream(idx)
        u = np.empty(reps)
        v = np.empty(reps)
        chunk = max(1, int(2_000_000 / m))
        done = 0
        while done < reps:
            take = min(chunk, reps - done)
            x = rng.standard_normal((take, m, factor_t.shape[0])) @ factor_t
            u[done : done + take], v[done : done + take] = uncentered_sq_corr_pair(x)
            done += take
        w = (u - u.mean()) * (v - v.mean())
        cov = float(np.sum(w) / (reps - 1))
        se = float(np.std(w, ddof=1) / math.sqrt(reps))
        rows.append(DecayRow(m=m, cov=cov, m_abs_cov=m * abs(cov), se=se))
    return rows
