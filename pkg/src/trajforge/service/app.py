"""FastAPI application wrapping the evaluation and evolution operations."""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import TrajforgeError
from . import ops
from .schemas import (
    BenchRequest,
    BenchResponse,
    EvalRequest,
    EvalResponse,
    EvolveRequest,
    EvolveResponse,
    HealthResponse,
    HeuristicsResponse,
    StatsRequest,
    StatsResponse,
)

app = FastAPI(title="trajforge", version=ops.health()["version"])


@app.exception_handler(TrajforgeError)
def domain_error(request: Request, exc: TrajforgeError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.get("/health", response_model=HealthResponse)
def health():
    return ops.health()


@app.get("/heuristics", response_model=HeuristicsResponse)
def heuristics():
    return {"heuristics": ops.list_heuristics()}


@app.post("/eval", response_model=EvalResponse)
def eval_heuristic(request: EvalRequest):
    return ops.evaluate(
        data_root=request.data_root,
        dataset=request.dataset,
        heuristic=request.heuristic,
        code=request.code,
        k=request.k,
        seeds=request.seeds,
        subset=request.subset,
    )


@app.post("/stats", response_model=StatsResponse)
def stats(request: StatsRequest):
    return ops.candidate_stats(
        data_root=request.data_root,
        dataset=request.dataset,
        heuristic=request.heuristic,
        code=request.code,
        k=request.k,
        seed=request.seed,
        subset=request.subset,
    )


@app.post("/bench", response_model=BenchResponse)
def bench(request: BenchRequest):
    return ops.bench(
        data_root=request.data_root,
        table=request.table,
        k=request.k,
        seed=request.seed,
    )


@app.post("/evolve", response_model=EvolveResponse)
def evolve(request: EvolveRequest):
    return ops.run_evolution(
        data_root=request.data_root,
        test_split=request.test_split,
        provider_spec=request.provider.model_dump(),
        run_dir=request.run_dir,
        run_options=request.run,
    )
