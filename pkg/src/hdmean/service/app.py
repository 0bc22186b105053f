"""FastAPI service wrapping the core package.

Error contract: invalid parameter domains come back as HTTP 400 with
``detail.code == "domain-error"``; data defects (constant columns and the
like) as 400 with ``detail.code == "degenerate-data"`` plus the offending
column; request-shape problems are FastAPI's usual 422.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, corrmat, limit_law, mean_tests, moments
from ..errors import DegenerateDataError, DomainError, NumericError
from ..sample_stats import pooled_summary, summarize
from ..simulate import ExperimentConfig, run_null_experiment
from . import models as m

app = FastAPI(
    title="hdmean service",
    version=__version__,
    description="Mean tests for data with more dimensions than observations",
)


@app.exception_handler(DomainError)
async def _domain_error(request: Request, exc: DomainError):
    return JSONResponse(status_code=400, content={"detail": {"code": "domain-error", "message": str(exc)}})


@app.exception_handler(DegenerateDataError)
async def _degenerate_error(request: Request, exc: DegenerateDataError):
    detail = {"code": "degenerate-data", "message": str(exc)}
    if exc.column is not None:
        detail["column"] = exc.column
    return JSONResponse(status_code=400, content={"detail": detail})


@app.exception_handler(NumericError)
async def _numeric_error(request: Request, exc: NumericError):
    return JSONResponse(status_code=400, content={"detail": {"code": "numeric-error", "message": str(exc)}})


def _law_model(law: limit_law.MixtureLaw) -> m.LawModel:
    return m.LawModel(b=law.b, rho=list(law.rho))


def _resolve_request_law(spec, summary, estimate) -> limit_law.MixtureLaw:
    if isinstance(spec, m.LawModel):
        return limit_law.law_from_dict(spec.model_dump())
    if spec == "normal":
        return limit_law.normal_law()
    return limit_law.plugin_law(summary, estimate)


def _seed_model(spec) -> m.SeedModel:
    return m.SeedModel(master_seed=spec.master_seed, stream_id=spec.stream_id)


def _report_model(report, law, p_val, seed_spec) -> m.TestReportModel:
    return m.TestReportModel(
        variant=report.variant,
        statistic=report.statistic,
        numerator=report.numerator,
        denominator=report.denominator,
        denominator_flipped=report.denominator_flipped,
        p=report.p,
        n=list(report.n) if isinstance(report.n, tuple) else report.n,
        trace_estimate=m.TraceEstimateModel(**report.trace_estimate.to_dict()),
        p_value=p_val,
        law=_law_model(law),
        seed=_seed_model(seed_spec),
    )


@app.get("/health", response_model=m.HealthResponse)
def health() -> m.HealthResponse:
    return m.HealthResponse(status="ok", version=__version__)


@app.post("/tests/one-sample", response_model=m.TestReportModel)
def one_sample_test(req: m.OneSampleTestRequest) -> m.TestReportModel:
    rows = np.asarray(req.rows, dtype=float)
    if rows.ndim != 2 or rows.shape[0] < 4:
        raise DomainError("one-sample tests need a rectangular table with n >= 4 rows")
    summary = summarize(rows)
    n = rows.shape[0]
    report = mean_tests.t_sd_one(summary, n) if req.variant == "tsd" else mean_tests.t_p1(summary, n)
    law = _resolve_request_law(req.law, summary, report.trace_estimate)
    seed = m.seed_spec(req.seed)
    p_val = limit_law.p_value(law, report.statistic, method=req.method, n_draws=req.mc_draws, seed=seed)
    return _report_model(report, law, p_val, seed)


@app.post("/tests/two-sample", response_model=m.TestReportModel)
def two_sample_test(req: m.TwoSampleTestRequest) -> m.TestReportModel:
    rows1 = np.asarray(req.rows1, dtype=float)
    rows2 = np.asarray(req.rows2, dtype=float)
    if rows1.ndim != 2 or rows2.ndim != 2:
        raise DomainError("both samples must be rectangular tables")
    summary = pooled_summary(rows1, rows2)
    n1, n2 = rows1.shape[0], rows2.shape[0]
    if req.variant == "tsd2":
        report = mean_tests.t_sd_two(summary, n1, n2)
    else:
        report = mean_tests.t_p2(summary, n1, n2)
    law = _resolve_request_law(req.law, summary, report.trace_estimate)
    seed = m.seed_spec(req.seed)
    p_val = limit_law.p_value(law, report.statistic, method=req.method, n_draws=req.mc_draws, seed=seed)
    return _report_model(report, law, p_val, seed)


@app.post("/matrices/generate", response_model=m.MatrixResponse)
def generate_matrix(req: m.MatrixRequest) -> m.MatrixResponse:
    if req.model == "spectrum":
        if req.spectrum is None:
            raise DomainError("model 'spectrum' requires the eigenvalue list")
        matrix = corrmat.from_spectrum(np.asarray(req.spectrum, dtype=float), seed=req.seed)
    else:
        if req.p is None:
            raise DomainError(f"model {req.model!r} requires p")
        if req.model == "cs":
            if req.r is None:
                raise DomainError("model 'cs' requires r")
            matrix = corrmat.compound_symmetric(req.p, req.r)
        elif req.model == "block":
            if req.r is None:
                raise DomainError("model 'block' requires r")
            matrix = corrmat.block_spiked(req.p, req.r)
        else:
            if req.gamma is None:
                raise DomainError("model 'ar1' requires gamma")
            matrix = corrmat.ar1(req.p, req.gamma)
    return m.MatrixResponse(p=matrix.shape[0], matrix=matrix.tolist())


@app.post("/laws/p-value", response_model=m.PValueResponse)
def law_p_value(req: m.PValueRequest) -> m.PValueResponse:
    law = limit_law.law_from_dict(req.law.model_dump())
    seed = m.seed_spec(req.seed)
    cdf_val = limit_law.cdf(law, req.statistic, method=req.method, n_draws=req.mc_draws, seed=seed)
    p_val = limit_law.p_value(law, req.statistic, method=req.method, n_draws=req.mc_draws, seed=seed)
    return m.PValueResponse(p_value=p_val, cdf=cdf_val, law=_law_model(law))


@app.post("/moments/corr4-check", response_model=m.MomentsCheckResponse)
def corr4_check(req: m.MomentsCheckRequest) -> m.MomentsCheckResponse:
    mat = np.asarray(req.corr4, dtype=float)
    indices = {
        "m112244": (1, 2, 3, 3, 4, 4),
        "m222": (1, 1, 2, 2, 3, 3),
        "m2222": (1, 1, 2, 2, 3, 3, 4, 4),
        "m44": (1, 1, 1, 1, 2, 2, 2, 2),
    }
    rows = []
    for kind in moments.CLOSED_FORM_KINDS:
        closed = moments.closed_form_moment(kind, mat)
        brute = moments.isserlis_moment(indices[kind], mat)
        rows.append(
            m.MomentRow(kind=kind, closed_form=closed, isserlis=brute, abs_diff=abs(closed - brute))
        )
    return m.MomentsCheckResponse(rows=rows)


@app.post("/simulations/run", response_model=m.SimulateResponse)
def run_simulation(req: m.SimulateRequest) -> m.SimulateResponse:
    seed = m.seed_spec(req.seed)
    if req.variant in ("tsd", "tp1"):
        if not isinstance(req.n, int):
            raise DomainError("one-sample experiments need an integer n")
        n_kwargs = {"n": req.n}
        n_echo: int | list[int] = req.n
    else:
        if not (isinstance(req.n, list) and len(req.n) == 2):
            raise DomainError("two-sample experiments need n = [n1, n2]")
        n_kwargs = {"n1": int(req.n[0]), "n2": int(req.n[1])}
        n_echo = [int(req.n[0]), int(req.n[1])]
    law: limit_law.MixtureLaw | str
    if isinstance(req.law, m.LawModel):
        law = limit_law.law_from_dict(req.law.model_dump())
    else:
        law = req.law
    cfg = ExperimentConfig(
        variant=req.variant,
        model=req.model.name,
        p=req.p,
        reps=req.reps,
        seed=seed,
        model_params=req.model.params(),
        law=law,
        grid_lo=req.grid.lo,
        grid_hi=req.grid.hi,
        n_grid=req.grid.points,
        mc_cdf_draws=req.mc_draws,
        **n_kwargs,
    )
    result = run_null_experiment(cfg, workers=max(1, req.workers))
    summary = m.SimulateSummary(
        variant=req.variant,
        model=req.model.name,
        p=req.p,
        n=n_echo,
        reps=req.reps,
        ks_vs_law=result.ks_vs_law,
        law=_law_model(result.law),
        seed=_seed_model(seed),
        elapsed_s=result.elapsed_s,
    )
    return m.SimulateResponse(
        draws=result.draws.tolist(),
        density=result.density_grid.tolist(),
        summary=summary,
    )
