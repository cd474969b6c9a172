"""Request and response models for the HTTP surface."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator


class HealthResponse(BaseModel):
    status: str
    version: str


class HeuristicInfo(BaseModel):
    name: str
    deterministic: bool
    params: dict


class HeuristicsResponse(BaseModel):
    heuristics: list[HeuristicInfo]


class EvalRequest(BaseModel):
    data_root: str
    dataset: str
    heuristic: str | None = None
    code: str | None = None
    k: int = Field(default=20, ge=1)
    seeds: list[int] = Field(default_factory=lambda: [0], min_length=1)
    subset: str = "test"

    @model_validator(mode="after")
    def exactly_one_source(self):
        if (self.heuristic is None) == (self.code is None):
            raise ValueError("provide exactly one of heuristic or code")
        return self


class EvalRecord(BaseModel):
    heuristic: str
    dataset: str
    seed: int
    scenes: int
    min_ade: float
    min_fde: float
    objective_j: float


class EvalMean(BaseModel):
    min_ade: float
    min_fde: float
    objective_j: float


class EvalResponse(BaseModel):
    records: list[EvalRecord]
    mean: EvalMean


class StatsRequest(BaseModel):
    data_root: str
    dataset: str
    heuristic: str | None = None
    code: str | None = None
    k: int = Field(default=20, ge=1)
    seed: int = 0
    subset: str = "test"

    @model_validator(mode="after")
    def exactly_one_source(self):
        if (self.heuristic is None) == (self.code is None):
            raise ValueError("provide exactly one of heuristic or code")
        return self


class StatsResponse(BaseModel):
    histogram: dict[int, int]
    block: str


class BenchRequest(BaseModel):
    data_root: str
    table: str
    k: int = Field(default=20, ge=1)
    seed: int = 0


class BenchCell(BaseModel):
    min_ade: float
    min_fde: float


class BenchRow(BaseModel):
    name: str
    cells: dict[str, BenchCell | None]


class BenchResponse(BaseModel):
    table: str
    columns: list[str]
    rows: list[BenchRow]


class ProviderSpec(BaseModel):
    kind: str = "scripted"
    endpoint: str = ""
    model_name: str = ""
    api_key_env: str = "LLM_API_KEY"
    request_timeout_seconds: float = 60.0
    max_retries: int = 3
    concurrency_limit: int = 4
    script_path: str | None = None


class EvolveRequest(BaseModel):
    data_root: str
    test_split: str
    run_dir: str
    provider: ProviderSpec
    run: dict = Field(default_factory=dict)


class EvolveResponse(BaseModel):
    run_dir: str
    report_path: str
    aborted: str | None
    generations: int
    best: dict | None
    test: EvalRecord | None


class ErrorBody(BaseModel):
    detail: str
