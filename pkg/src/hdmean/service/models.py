"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Union

from pydantic import BaseModel, Field

from ..sampling import SeedSpec

MethodName = Literal["monte_carlo", "cf_inversion"]


class SeedModel(BaseModel):
    master_seed: int = 0
    stream_id: int = 0

    def to_spec(self) -> SeedSpec:
        return SeedSpec(master_seed=self.master_seed, stream_id=self.stream_id)


SeedField = Union[int, SeedModel]


def seed_spec(seed: SeedField) -> SeedSpec:
    if isinstance(seed, SeedModel):
        return seed.to_spec()
    return SeedSpec(master_seed=int(seed))


class LawModel(BaseModel):
    b: float | None = None
    rho: list[float] = Field(default_factory=list)


LawField = Union[Literal["auto", "normal"], LawModel]


class TraceEstimateModel(BaseModel):
    tr_r2_hat: float
    correction: float
    estimate: float


class TestReportModel(BaseModel):
    variant: str
    statistic: float
    numerator: float
    denominator: float
    denominator_flipped: bool
    p: int
    n: Union[int, list[int]]
    trace_estimate: TraceEstimateModel
    p_value: float | None = None
    law: LawModel | None = None
    seed: SeedModel | None = None


class OneSampleTestRequest(BaseModel):
    rows: list[list[float]]
    variant: Literal["tsd", "tp1"] = "tp1"
    law: LawField = "auto"
    seed: SeedField = 0
    mc_draws: int = 200_000
    method: MethodName = "monte_carlo"


class TwoSampleTestRequest(BaseModel):
    rows1: list[list[float]]
    rows2: list[list[float]]
    variant: Literal["tsd2", "tp2"] = "tp2"
    law: LawField = "auto"
    seed: SeedField = 0
    mc_draws: int = 200_000
    method: MethodName = "monte_carlo"


class MatrixRequest(BaseModel):
    model: Literal["cs", "block", "ar1", "spectrum"]
    p: int | None = None
    r: float | None = None
    gamma: float | None = None
    spectrum: list[float] | None = None
    seed: int | None = None


class MatrixResponse(BaseModel):
    p: int
    matrix: list[list[float]]


class PValueRequest(BaseModel):
    law: LawModel
    statistic: float
    method: MethodName = "monte_carlo"
    mc_draws: int = 200_000
    seed: SeedField = 0


class PValueResponse(BaseModel):
    p_value: float
    cdf: float
    law: LawModel


class MomentRow(BaseModel):
    kind: str
    closed_form: float
    isserlis: float
    abs_diff: float


class MomentsCheckResponse(BaseModel):
    rows: list[MomentRow]


class MomentsCheckRequest(BaseModel):
    corr4: list[list[float]]


class ModelSpec(BaseModel):
    name: Literal["identity", "compound", "all_ones", "block", "ar1", "geometric"]
    r: float | None = None
    gamma: float | None = None
    tau: float | None = None

    def params(self) -> dict:
        out = {}
        for key in ("r", "gamma", "tau"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


class GridModel(BaseModel):
    lo: float = -4.0
    hi: float = 6.0
    points: int = 201


class SimulateRequest(BaseModel):
    variant: Literal["tsd", "tp1", "tsd2", "tp2"]
    model: ModelSpec
    p: int
    reps: int
    n: Union[int, list[int], None] = None
    seed: SeedField = 0
    law: LawField = "auto"
    mc_draws: int = 200_000
    grid: GridModel = Field(default_factory=GridModel)
    workers: int = 1


class SimulateSummary(BaseModel):
    variant: str
    model: str
    p: int
    n: Union[int, list[int]]
    reps: int
    ks_vs_law: float
    law: LawModel
    seed: SeedModel
    elapsed_s: float


class SimulateResponse(BaseModel):
    draws: list[float]
    density: list[list[float]]
    summary: SimulateSummary


class HealthResponse(BaseModel):
    status: str
    version: str
